#pragma once

#include "gazesim/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gazesim::ingest {

/// A column is addressed by header name or by 0-based index.
using ColumnRef = std::variant<std::string, std::size_t>;

struct CsvSchema {
    ColumnRef timestamp{std::string{"n"}};
    ColumnRef gaze_x{std::string{"x"}};
    ColumnRef gaze_y{std::string{"y"}};
    ColumnRef target_x{std::string{"xT"}};
    ColumnRef target_y{std::string{"yT"}};
    // Matched case-insensitively; an empty field is always missing.
    std::string missing_token{"NaN"};

    /// Parses "n,x,y,xT,yT" style overrides; all-digit entries are indices.
    static CsvSchema from_string(const std::string& spec);
};

struct RecordingIds {
    std::string subject_id;
    std::string session_id;
};

/// Reads a header-bearing CSV. Missing gaze is kept as valid=false with NaN
/// coordinates; timestamps are shifted so the first sample is t=0.
Recording parse_recording(std::istream& in, const CsvSchema& schema, const RecordingIds& ids);
Recording load_recording(const std::string& path, const CsvSchema& schema = {});

/// Subject/session from a GazeBase-style file stem ("S_1001_S1_RAN").
RecordingIds ids_from_filename(const std::string& path);

struct TimedPosition {
    TimeMs t_ms{0};
    double x{0.0};
    double y{0.0};
};

/// Maximal runs of exactly-equal target position.
std::vector<TargetSegment> segment_targets(const std::vector<TimedPosition>& positions,
                                           TimeMs sample_period_ms);

/// Canonical CSV with the default schema. Missing gaze is written as NaN.
void write_recording(std::ostream& out, const Recording& rec);

double compute_data_loss_pct(const std::vector<GazeSample>& samples);

/// Marks every sample with from_ms <= t < to_ms missing and refreshes the
/// data-loss figure.
void mask_interval(Recording& rec, TimeMs from_ms, TimeMs to_ms);

struct SynthConfig {
    std::size_t n_targets{100};
    double rate_hz{1000.0};
    double target_dwell_ms{1000.0};
    double target_x_range_dva{15.0};
    double target_y_range_dva{9.0};
    double min_displacement_dva{2.0};
    double saccade_latency_ms{200.0};
    double saccade_duration_ms{40.0};
    // When positive, each saccade lasts amplitude / velocity instead of
    // saccade_duration_ms.
    double saccade_velocity_deg_s{0.0};
    double fixation_noise_sd_dva{0.0};
    double nan_rate{0.0};
    Point calibration_offset_dva{};
    // Optional constant-velocity horizontal drift at the end of every target
    // interval; the generator labels those samples NonFixation.
    double drift_velocity_deg_s{0.0};
    double drift_duration_ms{0.0};
    std::uint64_t rng_seed{1};
    std::string subject_id{"synth"};
    std::string session_id{"1"};
};

struct SyntheticRecording {
    Recording recording;
    std::vector<Label> truth;  // generator labels, one per sample
};

SyntheticRecording synthesize_recording(const SynthConfig& cfg);

}  // namespace gazesim::ingest
