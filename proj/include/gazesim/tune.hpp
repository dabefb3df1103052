#pragma once

#include "gazesim/core.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gazesim::tune {

/// Per-sample ground truth. Anything other than a fixation label ("F",
/// "fixation", "fix"; case-insensitive) reads as NonFixation.
struct LabelFile {
    std::vector<TimeMs> t_ms;  // relative to the first row
    std::vector<Label> labels;
};

LabelFile parse_labels(std::istream& in);
LabelFile load_labels(const std::string& path);

/// Checks one label per sample with identical relative timestamps.
std::vector<Label> align_labels(const LabelFile& file, const Recording& rec);

double label_accuracy(std::span<const Label> predicted, std::span<const Label> truth);

struct ParamGrid {
    Algorithm algorithm{Algorithm::Ivt};
    std::vector<double> velocity_thresholds;
    std::vector<double> dispersion_thresholds;
    std::vector<double> min_durations_ms;
    std::vector<double> chi2_thresholds;
    std::vector<std::size_t> window_sizes;
    std::vector<double> deviations;

    /// Grid points in lexicographic parameter order.
    std::vector<ClassifierParams> points() const;
};

/// Default search grids per algorithm.
ParamGrid default_grid(Algorithm algo);

/// Strict-weak lexicographic order over parameter tuples of one algorithm.
bool params_less(const ClassifierParams& a, const ClassifierParams& b);

struct TuneItem {
    std::string name;
    Recording recording;
    std::optional<std::vector<Label>> truth;
};

struct GridResult {
    ClassifierParams params;
    double mean_accuracy{0.0};
    std::size_t rank{0};  // 1-based
};

/// Mean per-recording sample accuracy for every grid point, best first; equal
/// accuracies keep lexicographic parameter order.
std::vector<GridResult> grid_search(std::span<const TuneItem> corpus, const ParamGrid& grid, std::size_t jobs = 1);

void write_tuner_report(std::ostream& out, Algorithm algo, std::span<const GridResult> results);

}  // namespace gazesim::tune
