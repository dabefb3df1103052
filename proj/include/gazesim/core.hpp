#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gazesim {

// All positions are degrees of visual angle (dva), signed relative to the
// screen center. Time is integer milliseconds from recording start.
using TimeMs = std::int64_t;

struct Point {
    double x{0.0};
    double y{0.0};

    friend bool operator==(const Point&, const Point&) = default;
};

struct GazeSample {
    TimeMs t_ms{0};
    double x_dva{0.0};
    double y_dva{0.0};
    bool valid{true};

    Point position() const { return {x_dva, y_dva}; }
    friend bool operator==(const GazeSample&, const GazeSample&) = default;
};

struct TargetSegment {
    std::size_t index{0};
    double x_dva{0.0};
    double y_dva{0.0};
    TimeMs onset_ms{0};
    TimeMs offset_ms{0};  // exclusive

    Point position() const { return {x_dva, y_dva}; }
    friend bool operator==(const TargetSegment&, const TargetSegment&) = default;
};

struct Recording {
    std::string subject_id;
    std::string session_id;
    double rate_hz{1000.0};
    std::vector<GazeSample> samples;
    std::vector<TargetSegment> targets;
    double data_loss_pct{0.0};

    TimeMs sample_period_ms() const;
};

enum class Label : std::uint8_t { NonFixation = 0, Fixation = 1 };

struct FixationRun {
    std::size_t start_idx{0};
    std::size_t end_idx{0};  // inclusive
    TimeMs start_ms{0};
    TimeMs end_ms{0};

    TimeMs duration_ms() const { return end_ms - start_ms; }
    friend bool operator==(const FixationRun&, const FixationRun&) = default;
};

struct TriggerEvent {
    std::size_t target_index{0};
    TimeMs window_start_ms{0};
    TimeMs window_end_ms{0};  // exclusive: last sample time + one sample period
    std::size_t window_start_idx{0};
    std::size_t window_end_idx{0};  // inclusive
    double centroid_x_dva{0.0};
    double centroid_y_dva{0.0};
    double distance_dva{0.0};
    double angular_offset_deg{0.0};
    TimeMs onset_latency_ms{0};
    std::size_t contaminated_samples{0};
};

struct IvtParams {
    double velocity_threshold_deg_s{30.0};
};

struct IdtParams {
    double dispersion_threshold_dva{0.5};
    double min_duration_ms{30.0};
};

struct IkfParams {
    double chi2_threshold{3.75};
    std::size_t window_size_samples{5};
    double deviation{1000.0};
};

using ClassifierParams = std::variant<IvtParams, IdtParams, IkfParams>;

enum class Algorithm { Ivt, Idt, Ikf };

enum class OffsetMode { Arccos3D, PlanarEuclidean };

struct SimConfig {
    ClassifierParams classifier{IvtParams{}};
    double dwell_ms{100.0};
    double buffer_ms{1000.0};
    OffsetMode offset_mode{OffsetMode::Arccos3D};
};

/// Thrown for any violated precondition or malformed input.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double euclidean_distance(Point a, Point b);

/// Mean position of the samples; throws Error("empty window") when empty.
Point centroid(std::span<const GazeSample> samples);

/// Number of samples needed to cover `duration_ms` at `rate_hz`:
/// ceil(duration_ms * rate_hz / 1000).
std::size_t samples_for_duration(double duration_ms, double rate_hz);

Algorithm algorithm_of(const ClassifierParams& params);
std::string to_string(Algorithm algo);
Algorithm parse_algorithm(const std::string& name);
std::string to_string(OffsetMode mode);
OffsetMode parse_offset_mode(const std::string& name);

/// Default parameters for each algorithm.
ClassifierParams default_params(Algorithm algo);

void validate(const ClassifierParams& params);
void validate(const SimConfig& cfg);

}  // namespace gazesim
