#include "gazesim/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace gazesim {

TimeMs Recording::sample_period_ms() const {
    return std::max<TimeMs>(1, std::llround(1000.0 / rate_hz));
}

double euclidean_distance(Point a, Point b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

Point centroid(std::span<const GazeSample> samples) {
    if (samples.empty()) throw Error("empty window");
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& s : samples) {
        sx += s.x_dva;
        sy += s.y_dva;
    }
    const auto n = static_cast<double>(samples.size());
    return {sx / n, sy / n};
}

std::size_t samples_for_duration(double duration_ms, double rate_hz) {
    // Guard against 100 * 1000 / 1000 landing a hair above an integer.
    const double exact = duration_ms * rate_hz / 1000.0;
    const double rounded = std::round(exact);
    const double n = std::abs(exact - rounded) < 1e-9 ? rounded : std::ceil(exact);
    return static_cast<std::size_t>(std::max(1.0, n));
}

Algorithm algorithm_of(const ClassifierParams& params) {
    return static_cast<Algorithm>(params.index());
}

std::string to_string(Algorithm algo) {
    switch (algo) {
        case Algorithm::Ivt: return "ivt";
        case Algorithm::Idt: return "idt";
        case Algorithm::Ikf: return "ikf";
    }
    return "?";
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
    const auto n = lower(name);
    if (n == "ivt") return Algorithm::Ivt;
    if (n == "idt") return Algorithm::Idt;
    if (n == "ikf") return Algorithm::Ikf;
    throw Error("unknown algorithm '" + name + "'");
}

std::string to_string(OffsetMode mode) {
    return mode == OffsetMode::Arccos3D ? "arccos3d" : "planar";
}

OffsetMode parse_offset_mode(const std::string& name) {
    const auto n = lower(name);
    if (n == "arccos3d") return OffsetMode::Arccos3D;
    if (n == "planar") return OffsetMode::PlanarEuclidean;
    throw Error("unknown offset mode '" + name + "'");
}

ClassifierParams default_params(Algorithm algo) {
    switch (algo) {
        case Algorithm::Ivt: return IvtParams{};
        case Algorithm::Idt: return IdtParams{};
        case Algorithm::Ikf: return IkfParams{};
    }
    return IvtParams{};
}

namespace {

struct ParamValidator {
    void operator()(const IvtParams& p) const {
        if (!(p.velocity_threshold_deg_s > 0.0)) throw Error("velocity threshold must be positive");
    }
    void operator()(const IdtParams& p) const {
        if (!(p.dispersion_threshold_dva > 0.0)) throw Error("dispersion threshold must be positive");
        if (!(p.min_duration_ms > 0.0)) throw Error("minimum duration must be positive");
    }
    void operator()(const IkfParams& p) const {
        if (!(p.chi2_threshold > 0.0)) throw Error("chi-square threshold must be positive");
        if (p.window_size_samples < 2) throw Error("chi-square window must hold at least 2 samples");
        if (!(p.deviation > 0.0)) throw Error("deviation must be positive");
    }
};

}  // namespace

void validate(const ClassifierParams& params) {
    std::visit(ParamValidator{}, params);
}

void validate(const SimConfig& cfg) {
    validate(cfg.classifier);
    if (!(cfg.dwell_ms > 0.0)) throw Error("dwell time must be positive");
    if (cfg.dwell_ms > cfg.buffer_ms) throw Error("dwell time must not exceed the buffer-period");
}

}  // namespace gazesim
