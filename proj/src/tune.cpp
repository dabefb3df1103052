#include "gazesim/tune.hpp"

#include "gazesim/classify.hpp"
#include "gazesim/parallel.hpp"
#include "gazesim/stream.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <tuple>

namespace gazesim::tune {

namespace {

std::string trimmed_lower(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    s = s.substr(b);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string num(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::tuple<double, double, double> key(const ClassifierParams& p) {
    return std::visit(
        [](const auto& v) -> std::tuple<double, double, double> {
            using P = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<P, IvtParams>) return {v.velocity_threshold_deg_s, 0.0, 0.0};
            else if constexpr (std::is_same_v<P, IdtParams>) return {v.dispersion_threshold_dva, v.min_duration_ms, 0.0};
            else return {v.chi2_threshold, static_cast<double>(v.window_size_samples), v.deviation};
        },
        p);
}

}  // namespace

LabelFile parse_labels(std::istream& in) {
    LabelFile out;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed_lower(line).empty()) continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw Error("line " + std::to_string(line_no) + ": expected t_ms,label");
        double t = 0.0;
        const std::string ts = trimmed_lower(line.substr(0, comma));
        const auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), t);
        if (ec != std::errc{} || ptr != ts.data() + ts.size()) {
            throw Error("line " + std::to_string(line_no) + ": bad timestamp '" + ts + "'");
        }
        const std::string l = trimmed_lower(line.substr(comma + 1));
        out.t_ms.push_back(std::llround(t));
        out.labels.push_back(l == "f" || l == "fix" || l == "fixation" ? Label::Fixation : Label::NonFixation);
    }
    if (!out.t_ms.empty()) {
        const TimeMs t0 = out.t_ms.front();
        for (auto& t : out.t_ms) t -= t0;
    }
    return out;
}

LabelFile load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return parse_labels(in);
}

std::vector<Label> align_labels(const LabelFile& file, const Recording& rec) {
    if (file.labels.size() != rec.samples.size()) {
        throw Error("label count " + std::to_string(file.labels.size()) + " does not match " +
                    std::to_string(rec.samples.size()) + " samples");
    }
    for (std::size_t i = 0; i < file.t_ms.size(); ++i) {
        if (file.t_ms[i] != rec.samples[i].t_ms) {
            throw Error("label timestamp mismatch at row " + std::to_string(i + 1));
        }
    }
    return file.labels;
}

double label_accuracy(std::span<const Label> predicted, std::span<const Label> truth) {
    if (predicted.size() != truth.size()) throw Error("label sequences differ in length");
    if (truth.empty()) throw Error("no labels to compare");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::vector<ClassifierParams> ParamGrid::points() const {
    std::vector<ClassifierParams> out;
    switch (algorithm) {
        case Algorithm::Ivt:
            for (double v : velocity_thresholds) out.emplace_back(IvtParams{v});
            break;
        case Algorithm::Idt:
            for (double d : dispersion_thresholds)
                for (double m : min_durations_ms) out.emplace_back(IdtParams{d, m});
            break;
        case Algorithm::Ikf:
            for (double c : chi2_thresholds)
                for (std::size_t w : window_sizes)
                    for (double dev : deviations) out.emplace_back(IkfParams{c, w, dev});
            break;
    }
    if (out.empty()) throw Error("parameter grid has an empty axis");
    std::stable_sort(out.begin(), out.end(), params_less);
    return out;
}

ParamGrid default_grid(Algorithm algo) {
    ParamGrid g;
    g.algorithm = algo;
    g.velocity_thresholds = {20.0, 30.0, 40.0};
    g.dispersion_thresholds = {0.5, 0.75, 1.0};
    g.min_durations_ms = {20.0, 30.0, 40.0, 50.0, 60.0};
    for (int i = 0; i <= 19; ++i) g.chi2_thresholds.push_back(1.0 + 0.25 * i);
    g.window_sizes = {3, 5, 7};
    g.deviations = {500.0, 1000.0, 1500.0, 2000.0};
    return g;
}

bool params_less(const ClassifierParams& a, const ClassifierParams& b) {
    if (a.index() != b.index()) return a.index() < b.index();
    return key(a) < key(b);
}

std::vector<GridResult> grid_search(std::span<const TuneItem> corpus, const ParamGrid& grid, std::size_t jobs) {
    if (corpus.empty()) throw Error("no recordings to tune on");
    for (const auto& item : corpus) {
        if (!item.truth) throw Error("missing truth labels for recording '" + item.name + "'");
        if (item.truth->size() != item.recording.samples.size()) {
            throw Error("truth labels for '" + item.name + "' do not match its samples");
        }
    }
    const auto points = grid.points();

    std::vector<std::vector<GazeSample>> filled(corpus.size());
    parallel_for(corpus.size(), jobs, [&](std::size_t i) { filled[i] = stream::fill_forward(corpus[i].recording); });

    // accuracy[p][r]; reduced per point in corpus order.
    std::vector<std::vector<double>> accuracy(points.size(), std::vector<double>(corpus.size()));
    parallel_for(points.size() * corpus.size(), jobs, [&](std::size_t task) {
        const std::size_t p = task / corpus.size();
        const std::size_t r = task % corpus.size();
        const auto c = classify::classify(filled[r], points[p], corpus[r].recording.rate_hz);
        accuracy[p][r] = label_accuracy(c.labels, *corpus[r].truth);
    });

    // Summed in name order so the mean does not depend on corpus order.
    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return corpus[a].name < corpus[b].name; });

    std::vector<GridResult> out;
    for (std::size_t p = 0; p < points.size(); ++p) {
        double sum = 0.0;
        for (std::size_t r : order) sum += accuracy[p][r];
        out.push_back({points[p], sum / static_cast<double>(corpus.size()), 0});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const GridResult& a, const GridResult& b) { return a.mean_accuracy > b.mean_accuracy; });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
    return out;
}

void write_tuner_report(std::ostream& out, Algorithm algo, std::span<const GridResult> results) {
    switch (algo) {
        case Algorithm::Ivt: out << "velocity_threshold_deg_s"; break;
        case Algorithm::Idt: out << "dispersion_threshold_dva,min_duration_ms"; break;
        case Algorithm::Ikf: out << "chi2_threshold,window_size_samples,deviation"; break;
    }
    out << ",mean_accuracy,rank\n";
    for (const auto& r : results) {
        std::visit(
            [&out](const auto& p) {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, IvtParams>) out << num(p.velocity_threshold_deg_s);
                else if constexpr (std::is_same_v<P, IdtParams>) out << num(p.dispersion_threshold_dva) << ',' << num(p.min_duration_ms);
                else out << num(p.chi2_threshold) << ',' << p.window_size_samples << ',' << num(p.deviation);
            },
            r.params);
        out << ',' << num(r.mean_accuracy) << ',' << r.rank << '\n';
    }
}

}  // namespace gazesim::tune
