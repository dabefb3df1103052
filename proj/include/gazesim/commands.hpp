#pragma once

#include "gazesim/core.hpp"
#include "gazesim/ingest.hpp"
#include "gazesim/metrics.hpp"
#include "gazesim/tune.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gazesim::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kSuccess = 0, kPartialFailure = 1, kInvalidArguments = 2 };

/// Bad paths, empty corpora or invalid configurations; maps to kInvalidArguments.
class UsageError : public Error {
public:
    using Error::Error;
};

struct RunManifest {
    fs::path corpus;
    ingest::CsvSchema schema;
    SimConfig config;
    fs::path out_dir;
    std::size_t jobs{1};
    std::uint64_t seed{1};
    bool pace{false};
};

struct Failure {
    std::string recording;
    std::string reason;
};

struct Corpus {
    std::vector<std::string> names;  // file stems, sorted
    std::vector<Recording> recordings;
    std::vector<Failure> failures;
};

/// Every *.csv directly inside `path` (or `path` itself when it is a file),
/// in sorted filename order. Throws Error("no recordings") when none exist.
Corpus load_corpus(const fs::path& path, const ingest::CsvSchema& schema, std::size_t jobs);

struct CorpusSummary {
    struct Entry {
        std::string name;
        std::size_t n_samples{0};
        std::size_t n_targets{0};
        double data_loss_pct{0.0};
    };
    std::vector<Entry> recordings;
    std::size_t n_recordings{0};
    std::size_t n_targets{0};
    double loss_median_pct{0.0};
    double loss_sd_pct{0.0};  // population SD
    double loss_max_pct{0.0};
    std::vector<Failure> failures;
};

CorpusSummary cmd_validate(const fs::path& corpus, const ingest::CsvSchema& schema, std::size_t jobs);
void write_summary_json(std::ostream& out, const CorpusSummary& summary);

struct RunOutcome {
    metrics::QualityReport report;
    std::vector<Failure> failures;
    int exit_code{kSuccess};
};

/// Simulates every recording and writes report.json, users.csv, sweep.csv and
/// triggers/<recording>.csv under manifest.out_dir (plus failures.csv when
/// any recording failed).
RunOutcome cmd_run(const RunManifest& manifest);

struct SweepSpec {
    std::vector<ClassifierParams> classifiers;
    std::vector<double> dwells_ms;
    std::vector<double> buffers_ms;
};

struct SweepOutcome {
    std::vector<metrics::SweepRow> rows;
    std::vector<metrics::QualityReport> reports;  // same order as rows
    std::vector<Failure> failures;
    int exit_code{kSuccess};
};

/// One report per (algorithm, dwell, buffer) cell. sweep.csv rows run
/// buffer descending, then dwell ascending, then algorithm in given order.
SweepOutcome cmd_sweep(const RunManifest& manifest, const SweepSpec& spec);

/// Writes `count` recordings (S_<subject>_S<session>_RAN.csv, two sessions per
/// subject, seed + k for the k-th file) and generator labels under truth/.
std::vector<fs::path> cmd_synth(const ingest::SynthConfig& base, std::size_t count, const fs::path& out_dir);

struct TuneOutcome {
    std::vector<tune::GridResult> results;
    std::vector<Failure> failures;
    int exit_code{kSuccess};
};

/// Truth for recording <stem> is read from <truth_dir>/<stem>.csv. Writes
/// tune.csv under out_dir.
TuneOutcome cmd_tune(const fs::path& corpus, const ingest::CsvSchema& schema, const fs::path& truth_dir,
                     const tune::ParamGrid& grid, const fs::path& out_dir, std::size_t jobs);

}  // namespace gazesim::cli
