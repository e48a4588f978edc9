#pragma once

#include <array>
#include <optional>
#include <string>

#include "hlwr/curve_model.hpp"

namespace hlwr {

enum class WaveKind { ScS, ScR, AR, DS, ScAS, ScDS, ST };

const char* to_string(WaveKind k);
WaveKind wave_kind_from_string(const std::string& s);
bool is_rarefaction(WaveKind k);

/// One elementary wave. Shocks carry `speed`; rarefactions carry `fan`.
struct Wave {
    WaveKind kind = WaveKind::ST;
    HState left;
    HState right;
    double speed = 0.0;
    std::array<double, 2> fan{0.0, 0.0};

    double left_edge() const { return is_rarefaction(kind) ? fan[0] : speed; }
    double right_edge() const { return is_rarefaction(kind) ? fan[1] : speed; }
    friend bool operator==(const Wave&, const Wave&) = default;
};

/// |du| below this is a zero-strength wave.
inline constexpr double kZeroStrength = 1e-12;

double shock_speed(const CurveFamily& fam, const HState& left, const HState& right);

inline constexpr int kChordSamples = 256;

bool chord_s2a(const CurveFamily& fam, const HState& left, double u_plus, int n_samples = kChordSamples);
bool chord_s2d(const CurveFamily& fam, const HState& left, double u_plus, int n_samples = kChordSamples);

/// Builds a wave after checking the kind's preconditions; throws InadmissibleWave.
Wave make_wave(const CurveFamily& fam, WaveKind kind, const HState& left, const HState& right);

/// Same checks; returns the reason instead of throwing.
std::optional<std::string> wave_problem(const CurveFamily& fam, WaveKind kind, const HState& left, const HState& right);

/// State inside a rarefaction at xi = x/t.
HState rarefaction_state(const CurveFamily& fam, const Wave& w, double xi);

struct ProfileOptions {
    double start_offset = 1e-6; ///< relative to |u+ - u-|
    int min_steps = 10000;
    long max_steps = 4000000;
    double gap_tol = 1e-6;
    double window = 0.1;
};

struct ProfileReport {
    bool connected = false;
    double max_endpoint_gap = 0.0;
    bool monotone = false;
    long steps = 0;
    bool left_window = false;
    std::string note;
};

/// Integrates the travelling-wave equation along the wave's mode path.
ProfileReport viscous_profile_check(const CurveFamily& fam, const Wave& w, const ProfileOptions& opts = {});

} // namespace hlwr
