#include "gazesim/commands.hpp"
#include "gazesim/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

using namespace gazesim;

struct ClassifierFlags {
    std::optional<double> velocity;
    std::optional<double> dispersion;
    std::optional<double> min_duration;
    std::optional<double> chi2;
    std::optional<std::size_t> window;
    std::optional<double> deviation;

    void attach(CLI::App* app) {
        app->add_option("--velocity-threshold", velocity, "IVT velocity threshold (deg/s)");
        app->add_option("--dispersion", dispersion, "IDT dispersion threshold (dva)");
        app->add_option("--min-duration", min_duration, "IDT minimum duration (ms)");
        app->add_option("--chi2", chi2, "IKF chi-square threshold");
        app->add_option("--window", window, "IKF chi-square window (samples)");
        app->add_option("--deviation", deviation, "IKF deviation");
    }

    ClassifierParams params(Algorithm algo) const {
        switch (algo) {
            case Algorithm::Ivt: {
                IvtParams p;
                if (velocity) p.velocity_threshold_deg_s = *velocity;
                return p;
            }
            case Algorithm::Idt: {
                IdtParams p;
                if (dispersion) p.dispersion_threshold_dva = *dispersion;
                if (min_duration) p.min_duration_ms = *min_duration;
                return p;
            }
            case Algorithm::Ikf: {
                IkfParams p;
                if (chi2) p.chi2_threshold = *chi2;
                if (window) p.window_size_samples = *window;
                if (deviation) p.deviation = *deviation;
                return p;
            }
        }
        return IvtParams{};
    }
};

struct CommonFlags {
    std::string corpus;
    std::string schema;
    std::string out{"out"};
    std::size_t jobs{default_jobs()};
    std::uint64_t seed{1};
    std::string offset_mode{"arccos3d"};
    bool pace{false};

    void attach_corpus(CLI::App* app) {
        app->add_option("--corpus", corpus, "Recording CSV or directory of CSVs")->required();
        app->add_option("--schema", schema, "Columns as timestamp,x,y,target-x,target-y (names or indices)");
        app->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    }

    void attach_run(CLI::App* app) {
        attach_corpus(app);
        app->add_option("--out", out, "Output directory");
        app->add_option("--offset-mode", offset_mode, "Angular offset mode")
            ->check(CLI::IsMember({"arccos3d", "planar"}));
        app->add_option("--seed", seed, "Seed echoed into the manifest");
        app->add_flag("--pace", pace, "Replay at wall-clock speed");
    }

    cli::RunManifest manifest(const SimConfig& cfg) const {
        cli::RunManifest m;
        m.corpus = corpus;
        if (!schema.empty()) m.schema = ingest::CsvSchema::from_string(schema);
        m.config = cfg;
        m.out_dir = out;
        m.jobs = jobs;
        m.seed = seed;
        m.pace = pace;
        return m;
    }
};

void print_failures(const std::vector<cli::Failure>& failures) {
    for (const auto& f : failures) std::cerr << "failed: " << f.recording << ": " << f.reason << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Real-time gaze interaction simulator for eye-tracking signal quality"};
    app.require_subcommand(1);

    CommonFlags common;
    ClassifierFlags classifier_flags;
    std::string algo{"ivt"};
    double dwell_ms = 100.0;
    double buffer_ms = 1000.0;

    auto* validate_cmd = app.add_subcommand("validate", "Check a corpus and report data loss");
    common.attach_corpus(validate_cmd);

    auto* run_cmd = app.add_subcommand("run", "Simulate one configuration over a corpus");
    common.attach_run(run_cmd);
    classifier_flags.attach(run_cmd);
    run_cmd->add_option("--algo", algo, "Classifier")->check(CLI::IsMember({"ivt", "idt", "ikf"}));
    run_cmd->add_option("--dwell-ms", dwell_ms, "Dwell-time threshold (ms)");
    run_cmd->add_option("--buffer-ms", buffer_ms, "Buffer-period (ms)");

    std::vector<double> dwell_list{100, 150, 200, 250, 300};
    std::vector<double> buffer_list{400, 500, 600, 700, 800, 900, 1000};
    std::vector<std::string> algo_list{"ivt", "idt", "ikf"};
    auto* sweep_cmd = app.add_subcommand("sweep", "Success-rate table over dwell/buffer/algorithm");
    common.attach_run(sweep_cmd);
    classifier_flags.attach(sweep_cmd);
    sweep_cmd->add_option("--algo", algo_list, "Classifiers")->delimiter(',')->check(CLI::IsMember({"ivt", "idt", "ikf"}));
    sweep_cmd->add_option("--dwell-list", dwell_list, "Dwell times (ms)")->delimiter(',');
    sweep_cmd->add_option("--buffer-list", buffer_list, "Buffer-periods (ms)")->delimiter(',');

    ingest::SynthConfig synth;
    std::size_t count = 2;
    std::string synth_out{"synth"};
    auto* synth_cmd = app.add_subcommand("synth", "Write synthetic random-saccade recordings");
    synth_cmd->add_option("--count", count, "Number of recordings")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--out", synth_out, "Output directory");
    synth_cmd->add_option("--seed", synth.rng_seed, "Seed of the first recording");
    synth_cmd->add_option("--targets", synth.n_targets, "Targets per recording");
    synth_cmd->add_option("--rate", synth.rate_hz, "Sampling rate (Hz)");
    synth_cmd->add_option("--target-ms", synth.target_dwell_ms, "Target display time (ms)");
    synth_cmd->add_option("--min-displacement", synth.min_displacement_dva, "Minimum target step (dva)");
    synth_cmd->add_option("--latency-ms", synth.saccade_latency_ms, "Saccade latency (ms)");
    synth_cmd->add_option("--saccade-ms", synth.saccade_duration_ms, "Saccade duration (ms)");
    synth_cmd->add_option("--saccade-velocity", synth.saccade_velocity_deg_s, "Saccade velocity (deg/s), overrides --saccade-ms");
    synth_cmd->add_option("--noise", synth.fixation_noise_sd_dva, "Gaussian noise SD (dva)");
    synth_cmd->add_option("--nan-rate", synth.nan_rate, "Probability a sample is missing");
    synth_cmd->add_option("--offset-x", synth.calibration_offset_dva.x, "Constant horizontal gaze bias (dva)");
    synth_cmd->add_option("--offset-y", synth.calibration_offset_dva.y, "Constant vertical gaze bias (dva)");
    synth_cmd->add_option("--drift-velocity", synth.drift_velocity_deg_s, "End-of-target drift velocity (deg/s)");
    synth_cmd->add_option("--drift-ms", synth.drift_duration_ms, "End-of-target drift duration (ms)");

    std::string truth_dir;
    std::string tune_algo{"ivt"};
    auto* tune_cmd = app.add_subcommand("tune", "Grid-search classifier parameters against truth labels");
    common.attach_corpus(tune_cmd);
    tune_cmd->add_option("--truth", truth_dir, "Directory of <recording>.csv truth label files")->required();
    tune_cmd->add_option("--algo", tune_algo, "Classifier")->check(CLI::IsMember({"ivt", "idt", "ikf"}));
    tune_cmd->add_option("--out", common.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kSuccess : cli::kInvalidArguments;
    }

    try {
        if (*validate_cmd) {
            const auto schema = common.schema.empty() ? ingest::CsvSchema{} : ingest::CsvSchema::from_string(common.schema);
            const auto summary = cli::cmd_validate(common.corpus, schema, common.jobs);
            cli::write_summary_json(std::cout, summary);
            print_failures(summary.failures);
            return summary.failures.empty() ? cli::kSuccess : cli::kPartialFailure;
        }
        if (*run_cmd) {
            const Algorithm a = parse_algorithm(algo);
            const SimConfig cfg{classifier_flags.params(a), dwell_ms, buffer_ms, parse_offset_mode(common.offset_mode)};
            const auto outcome = cli::cmd_run(common.manifest(cfg));
            std::cout << "success_rate_pct " << outcome.report.success_rate_pct << " ("
                      << outcome.report.n_trigger_events << "/" << outcome.report.n_targets << ")\n";
            print_failures(outcome.failures);
            return outcome.exit_code;
        }
        if (*sweep_cmd) {
            cli::SweepSpec spec;
            for (const auto& name : algo_list) spec.classifiers.push_back(classifier_flags.params(parse_algorithm(name)));
            spec.dwells_ms = dwell_list;
            spec.buffers_ms = buffer_list;
            SimConfig cfg;
            cfg.offset_mode = parse_offset_mode(common.offset_mode);
            const auto outcome = cli::cmd_sweep(common.manifest(cfg), spec);
            std::cout << "wrote " << outcome.rows.size() << " rows to " << (std::filesystem::path(common.out) / "sweep.csv").string() << '\n';
            print_failures(outcome.failures);
            return outcome.exit_code;
        }
        if (*synth_cmd) {
            const auto files = cli::cmd_synth(synth, count, synth_out);
            for (const auto& f : files) std::cout << f.string() << '\n';
            return cli::kSuccess;
        }
        if (*tune_cmd) {
            const auto schema = common.schema.empty() ? ingest::CsvSchema{} : ingest::CsvSchema::from_string(common.schema);
            const auto grid = tune::default_grid(parse_algorithm(tune_algo));
            const auto outcome = cli::cmd_tune(common.corpus, schema, truth_dir, grid, common.out, common.jobs);
            tune::write_tuner_report(std::cout, grid.algorithm, std::span(outcome.results).first(std::min<std::size_t>(5, outcome.results.size())));
            print_failures(outcome.failures);
            return outcome.exit_code;
        }
    } catch (const cli::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kInvalidArguments;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kPartialFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kPartialFailure;
    }
    return cli::kInvalidArguments;
}
