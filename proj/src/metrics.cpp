#include "gazesim/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>

namespace gazesim::metrics {

namespace {

struct Direction {
    double x, y, z;
};

Direction direction_of(Point p) {
    constexpr double deg = std::numbers::pi / 180.0;
    const double x = std::tan(p.x * deg);
    const double y = std::tan(p.y * deg);
    const double norm = std::sqrt(x * x + y * y + 1.0);
    return {x / norm, y / norm, 1.0 / norm};
}

std::string num(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

double angular_offset(Point gaze, Point target, OffsetMode mode) {
    if (mode == OffsetMode::PlanarEuclidean) return euclidean_distance(gaze, target);
    const Direction g = direction_of(gaze);
    const Direction t = direction_of(target);
    // Same angle as arccos of the clamped dot product, but well conditioned
    // near zero where arccos loses all precision.
    const double dot = std::clamp(g.x * t.x + g.y * t.y + g.z * t.z, -1.0, 1.0);
    const double cx = g.y * t.z - g.z * t.y;
    const double cy = g.z * t.x - g.x * t.z;
    const double cz = g.x * t.y - g.y * t.x;
    const double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
    return std::atan2(cross, dot) * 180.0 / std::numbers::pi;
}

double success_rate_recording(std::span<const std::optional<TriggerEvent>> events) {
    if (events.empty()) throw Error("recording has no targets");
    const auto defined = std::count_if(events.begin(), events.end(), [](const auto& e) { return e.has_value(); });
    return 100.0 * static_cast<double>(defined) / static_cast<double>(events.size());
}

double success_rate_overall(std::span<const double> per_recording_rates) {
    if (per_recording_rates.empty()) throw Error("no recordings");
    double sum = 0.0;
    for (double r : per_recording_rates) sum += r;
    return sum / static_cast<double>(per_recording_rates.size());
}

double percentile(std::span<const double> values, double p) {
    if (values.empty()) throw Error("percentile of empty sample");
    if (!(p >= 0.0 && p <= 100.0)) throw Error("percentile outside [0,100]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double rank = p / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    if (frac == 0.0) return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

QualityReport build_report(std::span<const RecordingResult> recordings, const SimConfig& cfg) {
    if (recordings.empty()) throw Error("no recordings");
    QualityReport rep;
    rep.config = cfg;
    rep.config_fingerprint = config_fingerprint(cfg);
    rep.n_recordings = recordings.size();

    std::map<std::string, std::vector<double>> offsets_by_subject;
    std::vector<double> latencies;
    for (const auto& rec : recordings) {
        rep.per_recording_success_pct.push_back(success_rate_recording(rec.events));
        auto& offsets = offsets_by_subject[rec.subject_id];
        rep.n_targets += rec.events.size();
        for (const auto& ev : rec.events) {
            if (!ev) {
                ++rep.diagnostics.targets_without_event;
                continue;
            }
            ++rep.n_trigger_events;
            offsets.push_back(ev->angular_offset_deg);
            latencies.push_back(static_cast<double>(ev->onset_latency_ms));
            if (ev->contaminated_samples > 0) {
                ++rep.diagnostics.contaminated_events;
                rep.diagnostics.contaminated_samples += ev->contaminated_samples;
            }
        }
    }
    rep.success_rate_pct = success_rate_overall(rep.per_recording_success_pct);

    for (const auto& [subject, offsets] : offsets_by_subject) {
        if (offsets.empty()) {
            rep.diagnostics.subjects_without_events.push_back(subject);
            continue;
        }
        rep.users.push_back({subject, percentile(offsets, 50.0), percentile(offsets, 75.0),
                             percentile(offsets, 95.0), offsets.size()});
    }

    if (!rep.users.empty()) {
        for (std::size_t e = 0; e < kTiers.size(); ++e) {
            std::vector<double> tier_values;
            for (const auto& u : rep.users) tier_values.push_back(u.tier(e));
            for (std::size_t u = 0; u < kTiers.size(); ++u) rep.u_given_e[u][e] = percentile(tier_values, kTiers[u]);
        }
    }

    if (!latencies.empty()) {
        rep.onset_median_ms = percentile(latencies, 50.0);
        double mean = 0.0;
        for (double l : latencies) mean += l;
        mean /= static_cast<double>(latencies.size());
        double ss = 0.0;
        for (double l : latencies) ss += (l - mean) * (l - mean);
        rep.onset_sd_ms = std::sqrt(ss / static_cast<double>(latencies.size()));
    }
    return rep;
}

std::string describe(const ClassifierParams& params) {
    return std::visit(
        [](const auto& p) -> std::string {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, IvtParams>) {
                return "ivt(velocity=" + num(p.velocity_threshold_deg_s) + ")";
            } else if constexpr (std::is_same_v<P, IdtParams>) {
                return "idt(dispersion=" + num(p.dispersion_threshold_dva) + ",min_duration=" + num(p.min_duration_ms) + ")";
            } else {
                return "ikf(chi2=" + num(p.chi2_threshold) + ",window=" + std::to_string(p.window_size_samples) +
                       ",deviation=" + num(p.deviation) + ")";
            }
        },
        params);
}

std::string config_fingerprint(const SimConfig& cfg) {
    const std::string canonical = describe(cfg.classifier) + ";dwell=" + num(cfg.dwell_ms) +
                                  ";buffer=" + num(cfg.buffer_ms) + ";offset=" + to_string(cfg.offset_mode);
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

nlohmann::ordered_json params_json(const ClassifierParams& params) {
    return std::visit(
        [](const auto& p) -> nlohmann::ordered_json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, IvtParams>) {
                return {{"velocity_threshold_deg_s", p.velocity_threshold_deg_s}};
            } else if constexpr (std::is_same_v<P, IdtParams>) {
                return {{"dispersion_threshold_dva", p.dispersion_threshold_dva}, {"min_duration_ms", p.min_duration_ms}};
            } else {
                return {{"chi2_threshold", p.chi2_threshold},
                        {"window_size_samples", p.window_size_samples},
                        {"deviation", p.deviation}};
            }
        },
        params);
}

nlohmann::ordered_json opt(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string tier_name(std::size_t i) {
    return std::to_string(static_cast<int>(kTiers[i]));
}

}  // namespace

void write_report_json(std::ostream& out, const QualityReport& r) {
    nlohmann::ordered_json j;
    j["config"] = {{"algorithm", to_string(algorithm_of(r.config.classifier))},
                   {"params", params_json(r.config.classifier)},
                   {"dwell_ms", r.config.dwell_ms},
                   {"buffer_ms", r.config.buffer_ms},
                   {"offset_mode", to_string(r.config.offset_mode)}};
    j["config_fingerprint"] = r.config_fingerprint;
    j["n_recordings"] = r.n_recordings;
    j["n_targets"] = r.n_targets;
    j["n_trigger_events"] = r.n_trigger_events;
    j["success_rate_pct"] = r.success_rate_pct;
    j["per_recording_success_pct"] = r.per_recording_success_pct;

    nlohmann::ordered_json ue = nlohmann::ordered_json::object();
    for (std::size_t u = 0; u < kTiers.size(); ++u) {
        for (std::size_t e = 0; e < kTiers.size(); ++e) {
            ue["U" + tier_name(u) + "|E" + tier_name(e)] = opt(r.u_given_e[u][e]);
        }
    }
    j["u_given_e"] = ue;
    j["onset_median_ms"] = opt(r.onset_median_ms);
    j["onset_sd_ms"] = opt(r.onset_sd_ms);

    auto users = nlohmann::ordered_json::array();
    for (const auto& u : r.users) {
        users.push_back({{"subject_id", u.subject_id}, {"E50", u.e50}, {"E75", u.e75}, {"E95", u.e95},
                         {"n_events", u.n_events}});
    }
    j["users"] = users;
    j["diagnostics"] = {{"targets_without_event", r.diagnostics.targets_without_event},
                        {"contaminated_events", r.diagnostics.contaminated_events},
                        {"contaminated_samples", r.diagnostics.contaminated_samples},
                        {"subjects_without_events", r.diagnostics.subjects_without_events}};
    out << j.dump(2) << '\n';
}

void write_users_csv(std::ostream& out, const QualityReport& report) {
    out << "subject_id,E50,E75,E95\n";
    for (const auto& u : report.users) {
        out << u.subject_id << ',' << num(u.e50) << ',' << num(u.e75) << ',' << num(u.e95) << '\n';
    }
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "buffer_ms,dwell_ms,algorithm,success_rate_pct\n";
    for (const auto& r : rows) {
        out << num(r.buffer_ms) << ',' << num(r.dwell_ms) << ',' << to_string(r.algorithm) << ','
            << num(r.success_rate_pct) << '\n';
    }
}

}  // namespace gazesim::metrics
