#include "gazesim/commands.hpp"

#include "gazesim/classify.hpp"
#include "gazesim/interact.hpp"
#include "gazesim/parallel.hpp"
#include "gazesim/stream.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>

namespace gazesim::cli {

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    return out;
}

std::vector<fs::path> list_csv(const fs::path& path) {
    std::error_code ec;
    if (!fs::exists(path, ec)) throw UsageError("corpus path '" + path.string() + "' does not exist");
    std::vector<fs::path> files;
    if (fs::is_regular_file(path)) {
        files.push_back(path);
    } else {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw UsageError("no recordings");
    return files;
}

void write_failures(const fs::path& out_dir, const std::vector<Failure>& failures) {
    if (failures.empty()) return;
    auto out = open_out(out_dir / "failures.csv");
    out << "recording,reason\n";
    for (const auto& f : failures) {
        std::string reason = f.reason;
        std::replace(reason.begin(), reason.end(), ',', ';');
        out << f.recording << ',' << reason << '\n';
    }
}

std::string num(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void check_config(const SimConfig& cfg) {
    try {
        validate(cfg);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

struct CellKey {
    std::size_t algo;
    std::size_t dwell;
    std::size_t buffer;
};

std::vector<metrics::RecordingResult> to_recording_results(const Corpus& corpus,
                                                           const std::vector<std::optional<std::vector<interact::TargetResult>>>& per_rec) {
    std::vector<metrics::RecordingResult> out;
    for (std::size_t i = 0; i < corpus.recordings.size(); ++i) {
        if (!per_rec[i]) continue;
        metrics::RecordingResult r{corpus.recordings[i].subject_id, corpus.recordings[i].session_id, {}};
        for (const auto& t : *per_rec[i]) r.events.push_back(t.event);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

Corpus load_corpus(const fs::path& path, const ingest::CsvSchema& schema, std::size_t jobs) {
    const auto files = list_csv(path);
    std::vector<std::optional<Recording>> loaded(files.size());
    std::vector<std::string> errors(files.size());
    parallel_for(files.size(), jobs, [&](std::size_t i) {
        try {
            loaded[i] = ingest::load_recording(files[i].string(), schema);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    Corpus c;
    for (std::size_t i = 0; i < files.size(); ++i) {
        const std::string name = files[i].stem().string();
        if (loaded[i]) {
            c.names.push_back(name);
            c.recordings.push_back(std::move(*loaded[i]));
        } else {
            c.failures.push_back({name, errors[i]});
        }
    }
    return c;
}

CorpusSummary cmd_validate(const fs::path& corpus, const ingest::CsvSchema& schema, std::size_t jobs) {
    const Corpus c = load_corpus(corpus, schema, jobs);
    CorpusSummary s;
    s.failures = c.failures;
    std::vector<double> losses;
    for (std::size_t i = 0; i < c.recordings.size(); ++i) {
        const auto& r = c.recordings[i];
        s.recordings.push_back({c.names[i], r.samples.size(), r.targets.size(), r.data_loss_pct});
        s.n_targets += r.targets.size();
        losses.push_back(r.data_loss_pct);
    }
    s.n_recordings = c.recordings.size();
    if (!losses.empty()) {
        s.loss_median_pct = metrics::percentile(losses, 50.0);
        s.loss_max_pct = *std::max_element(losses.begin(), losses.end());
        double mean = 0.0;
        for (double l : losses) mean += l;
        mean /= static_cast<double>(losses.size());
        double ss = 0.0;
        for (double l : losses) ss += (l - mean) * (l - mean);
        s.loss_sd_pct = std::sqrt(ss / static_cast<double>(losses.size()));
    }
    return s;
}

void write_summary_json(std::ostream& out, const CorpusSummary& s) {
    nlohmann::ordered_json j;
    j["n_recordings"] = s.n_recordings;
    j["n_targets"] = s.n_targets;
    j["data_loss_pct"] = {{"median", s.loss_median_pct}, {"sd", s.loss_sd_pct}, {"max", s.loss_max_pct}};
    auto recs = nlohmann::ordered_json::array();
    for (const auto& r : s.recordings) {
        recs.push_back({{"name", r.name}, {"n_samples", r.n_samples}, {"n_targets", r.n_targets},
                        {"data_loss_pct", r.data_loss_pct}});
    }
    j["recordings"] = recs;
    auto fails = nlohmann::ordered_json::array();
    for (const auto& f : s.failures) fails.push_back({{"recording", f.recording}, {"reason", f.reason}});
    j["failures"] = fails;
    out << j.dump(2) << '\n';
}

RunOutcome cmd_run(const RunManifest& m) {
    check_config(m.config);
    const Corpus corpus = load_corpus(m.corpus, m.schema, m.jobs);
    RunOutcome outcome;
    outcome.failures = corpus.failures;

    const std::size_t n = corpus.recordings.size();
    std::vector<std::optional<std::vector<interact::TargetResult>>> per_rec(n);
    std::vector<std::string> errors(n);
    parallel_for(n, m.jobs, [&](std::size_t i) {
        try {
            per_rec[i] = interact::simulate(corpus.recordings[i], m.config, m.pace).results;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        if (!per_rec[i]) outcome.failures.push_back({corpus.names[i], errors[i]});
    }
    const auto results = to_recording_results(corpus, per_rec);
    if (results.empty()) throw Error("every recording failed");
    outcome.report = metrics::build_report(results, m.config);

    fs::create_directories(m.out_dir / "triggers");
    {
        auto out = open_out(m.out_dir / "report.json");
        metrics::write_report_json(out, outcome.report);
    }
    {
        auto out = open_out(m.out_dir / "users.csv");
        metrics::write_users_csv(out, outcome.report);
    }
    {
        auto out = open_out(m.out_dir / "sweep.csv");
        const metrics::SweepRow row{m.config.buffer_ms, m.config.dwell_ms, algorithm_of(m.config.classifier),
                                    outcome.report.success_rate_pct};
        metrics::write_sweep_csv(out, std::span(&row, 1));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!per_rec[i]) continue;
        auto out = open_out(m.out_dir / "triggers" / (corpus.names[i] + ".csv"));
        interact::write_trigger_events(out, *per_rec[i]);
    }
    write_failures(m.out_dir, outcome.failures);
    outcome.exit_code = outcome.failures.empty() ? kSuccess : kPartialFailure;
    return outcome;
}

SweepOutcome cmd_sweep(const RunManifest& m, const SweepSpec& spec) {
    if (spec.classifiers.empty() || spec.dwells_ms.empty() || spec.buffers_ms.empty()) {
        throw UsageError("sweep lists must be non-empty");
    }
    for (const auto& c : spec.classifiers) {
        for (double d : spec.dwells_ms) {
            for (double b : spec.buffers_ms) check_config(SimConfig{c, d, b, m.config.offset_mode});
        }
    }
    const Corpus corpus = load_corpus(m.corpus, m.schema, m.jobs);
    SweepOutcome outcome;
    outcome.failures = corpus.failures;
    const std::size_t n = corpus.recordings.size();

    std::vector<std::vector<GazeSample>> filled(n);
    parallel_for(n, m.jobs, [&](std::size_t i) { filled[i] = stream::fill_forward(corpus.recordings[i], m.pace); });

    std::vector<double> buffers = spec.buffers_ms;
    std::sort(buffers.begin(), buffers.end(), std::greater<>());
    std::vector<double> dwells = spec.dwells_ms;
    std::sort(dwells.begin(), dwells.end());

    struct Cell {
        metrics::SweepRow row;
        metrics::QualityReport report;
    };
    const std::size_t n_algos = spec.classifiers.size();
    std::vector<std::optional<Cell>> cells(n_algos * dwells.size() * buffers.size());
    auto cell_index = [&](const CellKey& k) { return (k.buffer * dwells.size() + k.dwell) * n_algos + k.algo; };

    fs::create_directories(m.out_dir / "reports");
    for (std::size_t a = 0; a < n_algos; ++a) {
        // Classification depends only on the algorithm, so each recording is
        // classified once and its runs reused for every dwell/buffer cell.
        std::vector<std::optional<std::vector<FixationRun>>> runs(n);
        std::vector<std::string> errors(n);
        parallel_for(n, m.jobs, [&](std::size_t r) {
            try {
                runs[r] = classify::classify(filled[r], spec.classifiers[a], corpus.recordings[r].rate_hz).runs;
            } catch (const std::exception& e) {
                errors[r] = e.what();
            }
        });
        for (std::size_t r = 0; r < n; ++r) {
            if (!runs[r]) {
                outcome.failures.push_back(
                    {corpus.names[r] + " [" + metrics::describe(spec.classifiers[a]) + "]", errors[r]});
            }
        }
        for (std::size_t d = 0; d < dwells.size(); ++d) {
            for (std::size_t b = 0; b < buffers.size(); ++b) {
                const SimConfig cfg{spec.classifiers[a], dwells[d], buffers[b], m.config.offset_mode};
                std::vector<std::optional<std::vector<interact::TargetResult>>> per_rec(n);
                parallel_for(n, m.jobs, [&](std::size_t r) {
                    if (!runs[r]) return;
                    per_rec[r] = interact::define_trigger_events(corpus.recordings[r], filled[r], *runs[r], cfg.dwell_ms,
                                                                 cfg.buffer_ms, cfg.offset_mode);
                });
                const auto results = to_recording_results(corpus, per_rec);
                if (results.empty()) throw Error("every recording failed for " + metrics::describe(cfg.classifier));
                auto report = metrics::build_report(results, cfg);
                const std::string name = to_string(algorithm_of(cfg.classifier)) + "_dwell" + num(dwells[d]) +
                                         "_buffer" + num(buffers[b]) + "_" + report.config_fingerprint + ".json";
                auto out = open_out(m.out_dir / "reports" / name);
                metrics::write_report_json(out, report);
                const metrics::SweepRow row{buffers[b], dwells[d], algorithm_of(cfg.classifier), report.success_rate_pct};
                cells[cell_index({a, d, b})] = Cell{row, std::move(report)};
            }
        }
    }
    for (auto& c : cells) {
        outcome.rows.push_back(c->row);
        outcome.reports.push_back(std::move(c->report));
    }
    {
        auto out = open_out(m.out_dir / "sweep.csv");
        metrics::write_sweep_csv(out, outcome.rows);
    }
    write_failures(m.out_dir, outcome.failures);
    outcome.exit_code = outcome.failures.empty() ? kSuccess : kPartialFailure;
    return outcome;
}

std::vector<fs::path> cmd_synth(const ingest::SynthConfig& base, std::size_t count, const fs::path& out_dir) {
    if (count == 0) throw UsageError("count must be positive");
    fs::create_directories(out_dir / "truth");
    std::vector<fs::path> written;
    for (std::size_t k = 0; k < count; ++k) {
        ingest::SynthConfig cfg = base;
        cfg.rng_seed = base.rng_seed + k;
        cfg.subject_id = std::to_string(1001 + k / 2);
        cfg.session_id = "S" + std::to_string(k % 2 + 1);
        const auto synth = ingest::synthesize_recording(cfg);
        const std::string stem = "S_" + cfg.subject_id + "_" + cfg.session_id + "_RAN";
        const fs::path rec_path = out_dir / (stem + ".csv");
        {
            auto out = open_out(rec_path);
            ingest::write_recording(out, synth.recording);
        }
        {
            auto out = open_out(out_dir / "truth" / (stem + ".csv"));
            classify::write_labels(out, synth.recording.samples, synth.truth);
        }
        written.push_back(rec_path);
    }
    return written;
}

TuneOutcome cmd_tune(const fs::path& corpus_path, const ingest::CsvSchema& schema, const fs::path& truth_dir,
                     const tune::ParamGrid& grid, const fs::path& out_dir, std::size_t jobs) {
    Corpus corpus = load_corpus(corpus_path, schema, jobs);
    TuneOutcome outcome;
    outcome.failures = corpus.failures;
    std::vector<tune::TuneItem> items;
    for (std::size_t i = 0; i < corpus.recordings.size(); ++i) {
        tune::TuneItem item{corpus.names[i], std::move(corpus.recordings[i]), std::nullopt};
        const fs::path truth_path = truth_dir / (corpus.names[i] + ".csv");
        if (!fs::exists(truth_path)) throw Error("missing truth file '" + truth_path.string() + "'");
        item.truth = tune::align_labels(tune::load_labels(truth_path.string()), item.recording);
        items.push_back(std::move(item));
    }
    outcome.results = tune::grid_search(items, grid, jobs);
    fs::create_directories(out_dir);
    auto out = open_out(out_dir / "tune.csv");
    tune::write_tuner_report(out, grid.algorithm, outcome.results);
    outcome.exit_code = outcome.failures.empty() ? kSuccess : kPartialFailure;
    return outcome;
}

}  // namespace gazesim::cli
