#include "gazesim/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string_view>

namespace gazesim::ingest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::optional<double> parse_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::size_t resolve_column(const ColumnRef& ref, const std::vector<std::string_view>& header) {
    if (const auto* idx = std::get_if<std::size_t>(&ref)) {
        if (*idx >= header.size()) throw Error("column index " + std::to_string(*idx) + " out of range");
        return *idx;
    }
    const auto& name = std::get<std::string>(ref);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw Error("column '" + name + "' not found in header");
}

std::string format_double(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

CsvSchema CsvSchema::from_string(const std::string& spec) {
    std::vector<ColumnRef> refs;
    for (auto field : split_fields(spec)) {
        if (field.empty()) throw Error("empty column in schema '" + spec + "'");
        const bool numeric = std::all_of(field.begin(), field.end(), [](char c) { return c >= '0' && c <= '9'; });
        if (numeric) {
            refs.emplace_back(static_cast<std::size_t>(std::stoul(std::string(field))));
        } else {
            refs.emplace_back(std::string(field));
        }
    }
    if (refs.size() != 5) throw Error("schema needs 5 columns (timestamp,x,y,target-x,target-y), got '" + spec + "'");
    CsvSchema s;
    s.timestamp = refs[0];
    s.gaze_x = refs[1];
    s.gaze_y = refs[2];
    s.target_x = refs[3];
    s.target_y = refs[4];
    return s;
}

Recording parse_recording(std::istream& in, const CsvSchema& schema, const RecordingIds& ids) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw Error("missing header row");

    const std::string header_line = line;
    const auto header = split_fields(header_line);
    const std::size_t cols[5] = {
        resolve_column(schema.timestamp, header), resolve_column(schema.gaze_x, header),
        resolve_column(schema.gaze_y, header), resolve_column(schema.target_x, header),
        resolve_column(schema.target_y, header)};
    for (int i = 0; i < 5; ++i) {
        for (int j = i + 1; j < 5; ++j) {
            if (cols[i] == cols[j]) throw Error("schema columns must be distinct");
        }
    }
    const std::size_t needed = *std::max_element(std::begin(cols), std::end(cols)) + 1;

    Recording rec;
    rec.subject_id = ids.subject_id;
    rec.session_id = ids.session_id;
    std::vector<TimedPosition> target_track;
    std::vector<TimeMs> raw_times;

    auto is_missing = [&](std::string_view f) { return f.empty() || iequals(f, schema.missing_token); };

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        const auto fail = [&](const std::string& what) {
            return Error("line " + std::to_string(line_no) + ": " + what);
        };
        if (fields.size() < needed) throw fail("expected at least " + std::to_string(needed) + " fields");

        const auto t = parse_double(fields[cols[0]]);
        if (!t || !std::isfinite(*t)) throw fail("bad timestamp '" + std::string(fields[cols[0]]) + "'");
        const auto tx = parse_double(fields[cols[3]]);
        const auto ty = parse_double(fields[cols[4]]);
        if (!tx || !ty || !std::isfinite(*tx) || !std::isfinite(*ty)) throw fail("bad target position");

        GazeSample s;
        s.t_ms = std::llround(*t);
        const auto gx_field = fields[cols[1]];
        const auto gy_field = fields[cols[2]];
        if (is_missing(gx_field) || is_missing(gy_field)) {
            s.valid = false;
        } else {
            const auto gx = parse_double(gx_field);
            const auto gy = parse_double(gy_field);
            if (!gx || !gy) throw fail("bad gaze value");
            s.valid = std::isfinite(*gx) && std::isfinite(*gy);
            if (s.valid) {
                s.x_dva = *gx;
                s.y_dva = *gy;
            }
        }
        if (!s.valid) {
            s.x_dva = kNaN;
            s.y_dva = kNaN;
        }
        if (!rec.samples.empty() && s.t_ms <= rec.samples.back().t_ms) {
            throw fail("non-monotone timestamp " + std::to_string(s.t_ms));
        }
        rec.samples.push_back(s);
        target_track.push_back({s.t_ms, *tx, *ty});
    }
    if (rec.samples.size() < 2) throw Error("recording needs at least 2 samples");

    const TimeMs t0 = rec.samples.front().t_ms;
    for (auto& s : rec.samples) s.t_ms -= t0;
    for (auto& p : target_track) p.t_ms -= t0;

    std::vector<TimeMs> diffs;
    diffs.reserve(rec.samples.size() - 1);
    for (std::size_t i = 1; i < rec.samples.size(); ++i) {
        diffs.push_back(rec.samples[i].t_ms - rec.samples[i - 1].t_ms);
    }
    std::nth_element(diffs.begin(), diffs.begin() + diffs.size() / 2, diffs.end());
    rec.rate_hz = 1000.0 / static_cast<double>(diffs[diffs.size() / 2]);

    rec.targets = segment_targets(target_track, rec.sample_period_ms());
    rec.data_loss_pct = compute_data_loss_pct(rec.samples);
    return rec;
}

Recording load_recording(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return parse_recording(in, schema, ids_from_filename(path));
}

RecordingIds ids_from_filename(const std::string& path) {
    const std::string stem = std::filesystem::path(path).stem().string();
    std::vector<std::string> parts;
    std::stringstream ss(stem);
    for (std::string p; std::getline(ss, p, '_');) parts.push_back(p);
    if (parts.size() >= 3 && parts[0] == "S") return {parts[1], parts[2]};
    return {stem, ""};
}

std::vector<TargetSegment> segment_targets(const std::vector<TimedPosition>& positions,
                                           TimeMs sample_period_ms) {
    std::vector<TargetSegment> out;
    for (const auto& p : positions) {
        if (out.empty() || p.x != out.back().x_dva || p.y != out.back().y_dva) {
            if (!out.empty()) out.back().offset_ms = p.t_ms;
            out.push_back({out.size(), p.x, p.y, p.t_ms, p.t_ms});
        }
    }
    if (!out.empty()) out.back().offset_ms = positions.back().t_ms + sample_period_ms;
    return out;
}

void write_recording(std::ostream& out, const Recording& rec) {
    out << "n,x,y,xT,yT\n";
    std::size_t seg = 0;
    for (const auto& s : rec.samples) {
        while (seg < rec.targets.size() && s.t_ms >= rec.targets[seg].offset_ms) ++seg;
        if (seg >= rec.targets.size() || s.t_ms < rec.targets[seg].onset_ms) {
            throw Error("sample at t=" + std::to_string(s.t_ms) + " has no target");
        }
        const auto& tg = rec.targets[seg];
        out << s.t_ms << ',' << (s.valid ? format_double(s.x_dva) : "NaN") << ','
            << (s.valid ? format_double(s.y_dva) : "NaN") << ',' << format_double(tg.x_dva) << ','
            << format_double(tg.y_dva) << '\n';
    }
}

double compute_data_loss_pct(const std::vector<GazeSample>& samples) {
    if (samples.empty()) return 0.0;
    const auto missing = std::count_if(samples.begin(), samples.end(), [](const auto& s) { return !s.valid; });
    return 100.0 * static_cast<double>(missing) / static_cast<double>(samples.size());
}

void mask_interval(Recording& rec, TimeMs from_ms, TimeMs to_ms) {
    for (auto& s : rec.samples) {
        if (s.t_ms >= from_ms && s.t_ms < to_ms) {
            s.valid = false;
            s.x_dva = kNaN;
            s.y_dva = kNaN;
        }
    }
    rec.data_loss_pct = compute_data_loss_pct(rec.samples);
}

SyntheticRecording synthesize_recording(const SynthConfig& cfg) {
    if (cfg.n_targets == 0) throw Error("synthetic recording needs at least one target");
    if (!(cfg.rate_hz > 0.0) || !(cfg.target_dwell_ms > 0.0)) throw Error("rate and target dwell must be positive");
    if (!(cfg.target_x_range_dva > 0.0)) throw Error("horizontal target range must be positive");
    if (!(cfg.target_y_range_dva >= 0.0)) throw Error("vertical target range must be non-negative");
    if (cfg.min_displacement_dva < 0.0) throw Error("minimum displacement must be non-negative");
    if (!(cfg.nan_rate >= 0.0 && cfg.nan_rate < 1.0)) throw Error("nan_rate must lie in [0,1)");
    if (cfg.fixation_noise_sd_dva < 0.0) throw Error("noise sd must be non-negative");

    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_real_distribution<double> ux(-cfg.target_x_range_dva, cfg.target_x_range_dva);
    std::uniform_real_distribution<double> uy(-cfg.target_y_range_dva, cfg.target_y_range_dva);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);

    SyntheticRecording out;
    Recording& rec = out.recording;
    rec.subject_id = cfg.subject_id;
    rec.session_id = cfg.session_id;
    rec.rate_hz = cfg.rate_hz;
    const TimeMs period = rec.sample_period_ms();
    const std::size_t per_target = samples_for_duration(cfg.target_dwell_ms, cfg.rate_hz);

    std::vector<Point> positions;
    for (std::size_t i = 0; i < cfg.n_targets; ++i) {
        Point p{ux(rng), uy(rng)};
        int attempts = 1;
        while (i > 0 && euclidean_distance(p, positions.back()) < cfg.min_displacement_dva) {
            if (++attempts > 1000) throw Error("cannot satisfy minimum target displacement");
            p = {ux(rng), uy(rng)};
        }
        positions.push_back(p);
    }

    const auto latency = static_cast<std::size_t>(std::llround(cfg.saccade_latency_ms * cfg.rate_hz / 1000.0));
    const std::size_t drift_samples =
        cfg.drift_velocity_deg_s > 0.0 && cfg.drift_duration_ms > 0.0
            ? samples_for_duration(cfg.drift_duration_ms, cfg.rate_hz)
            : 0;
    const double drift_step = cfg.drift_velocity_deg_s / cfg.rate_hz;

    rec.samples.reserve(cfg.n_targets * per_target);
    out.truth.reserve(cfg.n_targets * per_target);
    Point held{cfg.calibration_offset_dva.x, cfg.calibration_offset_dva.y};

    for (std::size_t i = 0; i < cfg.n_targets; ++i) {
        const Point target = positions[i];
        const Point dest{target.x + cfg.calibration_offset_dva.x, target.y + cfg.calibration_offset_dva.y};
        const double amplitude = euclidean_distance(held, dest);
        std::size_t ramp = 0;
        if (amplitude > 0.0) {
            ramp = cfg.saccade_velocity_deg_s > 0.0
                       ? std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(amplitude / cfg.saccade_velocity_deg_s * cfg.rate_hz)))
                       : samples_for_duration(cfg.saccade_duration_ms, cfg.rate_hz);
        }
        const double drift_sign = dest.x > 0.0 ? -1.0 : 1.0;
        const TimeMs onset = static_cast<TimeMs>(rec.samples.size()) * period;
        rec.targets.push_back({i, target.x, target.y, onset, onset + static_cast<TimeMs>(per_target) * period});

        Point last = held;
        for (std::size_t j = 0; j < per_target; ++j) {
            Point pos;
            Label label = Label::Fixation;
            if (j < latency) {
                pos = held;
            } else if (j < latency + ramp) {
                const std::size_t k = j - latency + 1;
                if (k == ramp) {
                    pos = dest;
                } else {
                    const double f = static_cast<double>(k) / static_cast<double>(ramp);
                    pos = {held.x + (dest.x - held.x) * f, held.y + (dest.y - held.y) * f};
                }
                label = Label::NonFixation;
            } else if (drift_samples > 0 && j + drift_samples >= per_target && j >= latency + ramp) {
                const auto k = static_cast<double>(j + drift_samples - per_target + 1);
                pos = {dest.x + drift_sign * drift_step * k, dest.y};
                label = Label::NonFixation;
            } else {
                pos = dest;
            }
            last = pos;

            GazeSample s;
            s.t_ms = static_cast<TimeMs>(rec.samples.size()) * period;
            const double nx = noise(rng);
            const double ny = noise(rng);
            const bool drop = unit(rng) < cfg.nan_rate;
            s.x_dva = pos.x + cfg.fixation_noise_sd_dva * nx;
            s.y_dva = pos.y + cfg.fixation_noise_sd_dva * ny;
            if (drop) {
                s.valid = false;
                s.x_dva = kNaN;
                s.y_dva = kNaN;
            }
            rec.samples.push_back(s);
            out.truth.push_back(label);
        }
        held = last;
    }
    rec.data_loss_pct = compute_data_loss_pct(rec.samples);
    return out;
}

}  // namespace gazesim::ingest
