#include "gazesim/interact.hpp"

#include "gazesim/metrics.hpp"
#include "gazesim/stream.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace gazesim::interact {

namespace {

// First index whose timestamp is >= t.
std::size_t first_at_or_after(std::span<const GazeSample> samples, double t) {
    const auto it = std::partition_point(samples.begin(), samples.end(),
                                         [t](const GazeSample& s) { return static_cast<double>(s.t_ms) < t; });
    return static_cast<std::size_t>(it - samples.begin());
}

}  // namespace

std::vector<CandidateWindow> enumerate_candidates(std::span<const FixationRun> runs,
                                                  std::span<const GazeSample> samples,
                                                  const TargetSegment& target, double dwell_ms,
                                                  double buffer_ms, double rate_hz) {
    if (dwell_ms > buffer_ms) throw Error("dwell time must not exceed the buffer-period");
    const std::size_t n = samples_for_duration(dwell_ms, rate_hz);
    const auto onset = static_cast<double>(target.onset_ms);
    const std::size_t lo = first_at_or_after(samples, onset);
    const std::size_t hi = first_at_or_after(samples, onset + buffer_ms);  // exclusive
    const Point tp = target.position();
    const auto nd = static_cast<double>(n);

    std::vector<CandidateWindow> out;
    for (const auto& run : runs) {
        if (run.end_idx < lo || run.start_idx >= hi) continue;
        const std::size_t a = std::max(run.start_idx, lo);
        const std::size_t b = std::min(run.end_idx, hi - 1);
        if (b + 1 - a < n) continue;

        double sx = 0.0;
        double sy = 0.0;
        for (std::size_t i = a; i < a + n; ++i) {
            sx += samples[i].x_dva;
            sy += samples[i].y_dva;
        }
        for (std::size_t s = a;; ++s) {
            const Point c{sx / nd, sy / nd};
            out.push_back({s, s + n - 1, c, euclidean_distance(c, tp)});
            if (s + n > b) break;
            sx += samples[s + n].x_dva - samples[s].x_dva;
            sy += samples[s + n].y_dva - samples[s].y_dva;
        }
    }
    return out;
}

std::optional<CandidateWindow> select_rank1(std::span<const CandidateWindow> candidates) {
    if (candidates.empty()) return std::nullopt;
    double best = candidates.front().distance_dva;
    for (const auto& c : candidates) best = std::min(best, c.distance_dva);
    const CandidateWindow* pick = nullptr;
    for (const auto& c : candidates) {
        if (c.distance_dva <= best + kTieToleranceDva && (!pick || c.start_idx < pick->start_idx)) pick = &c;
    }
    return *pick;
}

std::vector<TargetResult> define_trigger_events(const Recording& rec, std::span<const GazeSample> filled,
                                                std::span<const FixationRun> runs, double dwell_ms,
                                                double buffer_ms, OffsetMode mode) {
    const TimeMs period = rec.sample_period_ms();
    std::vector<TargetResult> out;
    out.reserve(rec.targets.size());
    for (const auto& target : rec.targets) {
        TargetResult r{target.index, std::nullopt};
        const auto candidates = enumerate_candidates(runs, filled, target, dwell_ms, buffer_ms, rec.rate_hz);
        if (const auto best = select_rank1(candidates)) {
            const auto window = filled.subspan(best->start_idx, best->end_idx - best->start_idx + 1);
            const Point c = centroid(window);
            TriggerEvent ev;
            ev.target_index = target.index;
            ev.window_start_idx = best->start_idx;
            ev.window_end_idx = best->end_idx;
            ev.window_start_ms = window.front().t_ms;
            ev.window_end_ms = window.back().t_ms + period;
            ev.centroid_x_dva = c.x;
            ev.centroid_y_dva = c.y;
            ev.distance_dva = euclidean_distance(c, target.position());
            ev.angular_offset_deg = metrics::angular_offset(c, target.position(), mode);
            ev.onset_latency_ms = ev.window_end_ms - target.onset_ms;
            ev.contaminated_samples = static_cast<std::size_t>(
                std::count_if(window.begin(), window.end(), [](const GazeSample& s) { return !s.valid; }));
            r.event = ev;
        }
        out.push_back(r);
    }
    return out;
}

Simulation simulate(const Recording& rec, const SimConfig& cfg, bool pace) {
    validate(cfg);
    Simulation sim;
    sim.filled = stream::fill_forward(rec, pace);
    sim.classification = classify::classify(sim.filled, cfg.classifier, rec.rate_hz);
    sim.results = define_trigger_events(rec, sim.filled, sim.classification.runs, cfg.dwell_ms, cfg.buffer_ms,
                                        cfg.offset_mode);
    return sim;
}

std::vector<TargetResult> simulate_recording(const Recording& rec, const SimConfig& cfg) {
    return simulate(rec, cfg).results;
}

void write_trigger_events(std::ostream& out, std::span<const TargetResult> results) {
    out << "target_index,window_start_ms,window_end_ms,centroid_x,centroid_y,distance_dva,"
           "angular_offset_deg,onset_latency_ms,contaminated_samples\n";
    const auto old_precision = out.precision(17);
    for (const auto& r : results) {
        if (!r.event) continue;
        const auto& e = *r.event;
        out << e.target_index << ',' << e.window_start_ms << ',' << e.window_end_ms << ',' << e.centroid_x_dva
            << ',' << e.centroid_y_dva << ',' << e.distance_dva << ',' << e.angular_offset_deg << ','
            << e.onset_latency_ms << ',' << e.contaminated_samples << '\n';
    }
    out.precision(old_precision);
}

}  // namespace gazesim::interact
