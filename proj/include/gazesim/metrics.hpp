#pragma once

#include "gazesim/core.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gazesim::metrics {

/// Angular distance in degrees between gaze centroid G and target T.
///   Arccos3D:        each (a, b) dva point becomes the direction
///                    (tan a, tan b, 1); theta = angle between directions.
///   PlanarEuclidean: Euclidean distance in dva.
double angular_offset(Point gaze, Point target, OffsetMode mode = OffsetMode::Arccos3D);

/// Per recording: 100 * defined / targets.
double success_rate_recording(std::span<const std::optional<TriggerEvent>> events);
/// Mean of per-recording rates, summed in the given order.
double success_rate_overall(std::span<const double> per_recording_rates);

/// Linear interpolation between closest ranks, rank = p/100 * (n - 1).
double percentile(std::span<const double> values, double p);

struct RecordingResult {
    std::string subject_id;
    std::string session_id;
    std::vector<std::optional<TriggerEvent>> events;  // one per target
};

inline constexpr std::array<double, 3> kTiers{50.0, 75.0, 95.0};

struct UserErrorSummary {
    std::string subject_id;
    double e50{0.0};
    double e75{0.0};
    double e95{0.0};
    std::size_t n_events{0};

    double tier(std::size_t i) const { return i == 0 ? e50 : i == 1 ? e75 : e95; }
};

struct Diagnostics {
    std::size_t targets_without_event{0};
    std::size_t contaminated_events{0};
    std::size_t contaminated_samples{0};
    std::vector<std::string> subjects_without_events;
};

struct QualityReport {
    SimConfig config;
    std::string config_fingerprint;
    std::size_t n_recordings{0};
    std::size_t n_targets{0};
    std::size_t n_trigger_events{0};
    double success_rate_pct{0.0};
    std::vector<double> per_recording_success_pct;
    std::vector<UserErrorSummary> users;
    // u_given_e[u][e]: population percentile kTiers[u] over per-user E at
    // kTiers[e]; nullopt when no user has events.
    std::array<std::array<std::optional<double>, 3>, 3> u_given_e{};
    std::optional<double> onset_median_ms;
    std::optional<double> onset_sd_ms;  // population SD (divisor n)
    Diagnostics diagnostics;
};

/// Users are pooled by subject id across sessions and reported in sorted id
/// order. Recordings are aggregated in the order given.
QualityReport build_report(std::span<const RecordingResult> recordings, const SimConfig& cfg);

/// Stable 64-bit FNV-1a of a canonical description of the config, as hex.
std::string config_fingerprint(const SimConfig& cfg);
std::string describe(const ClassifierParams& params);

void write_report_json(std::ostream& out, const QualityReport& report);
void write_users_csv(std::ostream& out, const QualityReport& report);

struct SweepRow {
    double buffer_ms{0.0};
    double dwell_ms{0.0};
    Algorithm algorithm{Algorithm::Ivt};
    double success_rate_pct{0.0};
};
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace gazesim::metrics
