#include "gazesim/classify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace gazesim::classify {

void OnlineClassifier::push(const GazeSample& s) {
    times_.push_back(s.t_ms);
    on_sample(s);
}

void OnlineClassifier::finish() {
    on_finish();
    if (labels_.size() != times_.size()) throw Error("classifier left samples unlabeled");
}

std::vector<FixationRun> OnlineClassifier::runs() const {
    std::vector<FixationRun> out;
    auto forced = run_starts_.begin();
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        while (forced != run_starts_.end() && *forced < i) ++forced;
        const bool forced_start = forced != run_starts_.end() && *forced == i;
        if (labels_[i] != Label::Fixation) continue;
        if (out.empty() || out.back().end_idx + 1 != i || forced_start) {
            out.push_back({i, i, times_[i], times_[i]});
        } else {
            out.back().end_idx = i;
            out.back().end_ms = times_[i];
        }
    }
    return out;
}

// --- IVT -------------------------------------------------------------------

IvtClassifier::IvtClassifier(IvtParams params, double rate_hz) : params_(params), rate_hz_(rate_hz) {
    validate(ClassifierParams{params_});
}

double IvtClassifier::velocity(const GazeSample& prev, const GazeSample& cur, double rate_hz) {
    const double vx = (cur.x_dva - prev.x_dva) * rate_hz;
    const double vy = (cur.y_dva - prev.y_dva) * rate_hz;
    return std::sqrt(vx * vx + vy * vy);
}

void IvtClassifier::on_sample(const GazeSample& s) {
    if (count_++ == 0) {
        prev_ = s;
        return;
    }
    const Label l = velocity(prev_, s, rate_hz_) < params_.velocity_threshold_deg_s ? Label::Fixation
                                                                                    : Label::NonFixation;
    // The first sample has no backward difference and takes the second's label.
    if (count_ == 2) commit(l);
    commit(l);
    prev_ = s;
}

void IvtClassifier::on_finish() {
    if (count_ < 2) throw Error("insufficient samples");
}

// --- IDT -------------------------------------------------------------------

IdtClassifier::IdtClassifier(IdtParams params, double rate_hz)
    : params_(params), seed_size_(samples_for_duration(params.min_duration_ms, rate_hz)) {
    validate(ClassifierParams{params_});
}

double IdtClassifier::window_dispersion() const {
    return (points_[max_x_.front()].x - points_[min_x_.front()].x) +
           (points_[max_y_.front()].y - points_[min_y_.front()].y);
}

void IdtClassifier::push_extrema(std::size_t idx) {
    const Point p = points_[idx];
    while (!max_x_.empty() && points_[max_x_.back()].x <= p.x) max_x_.pop_back();
    max_x_.push_back(idx);
    while (!min_x_.empty() && points_[min_x_.back()].x >= p.x) min_x_.pop_back();
    min_x_.push_back(idx);
    while (!max_y_.empty() && points_[max_y_.back()].y <= p.y) max_y_.pop_back();
    max_y_.push_back(idx);
    while (!min_y_.empty() && points_[min_y_.back()].y >= p.y) min_y_.pop_back();
    min_y_.push_back(idx);
}

void IdtClassifier::drop_before(std::size_t start) {
    for (auto* dq : {&max_x_, &min_x_, &max_y_, &min_y_}) {
        while (!dq->empty() && dq->front() < start) dq->pop_front();
    }
}

void IdtClassifier::restart_window(std::size_t start) {
    start_ = start;
    for (auto* dq : {&max_x_, &min_x_, &max_y_, &min_y_}) dq->clear();
    for (std::size_t i = start; i < points_.size(); ++i) push_extrema(i);
}

void IdtClassifier::on_sample(const GazeSample& s) {
    const std::size_t idx = points_.size();
    points_.push_back(s.position());
    push_extrema(idx);

    if (in_fixation_) {
        if (window_dispersion() <= params_.dispersion_threshold_dva) {
            commit(Label::Fixation);
            return;
        }
        in_fixation_ = false;
        restart_window(idx);
    }

    if (idx + 1 - start_ < seed_size_) return;
    if (window_dispersion() <= params_.dispersion_threshold_dva) {
        in_fixation_ = true;
        mark_run_start(start_);
        for (std::size_t i = start_; i <= idx; ++i) commit(Label::Fixation);
    } else {
        commit(Label::NonFixation);
        drop_before(++start_);
    }
}

void IdtClassifier::on_finish() {
    if (in_fixation_) return;
    for (std::size_t i = start_; i < points_.size(); ++i) commit(Label::NonFixation);
    start_ = points_.size();
    drop_before(start_);
}

// --- IKF -------------------------------------------------------------------

IkfClassifier::IkfClassifier(IkfParams params, double rate_hz)
    : params_(params),
      rate_hz_(rate_hz),
      filter_(rate_hz),
      tracker_(params.window_size_samples, params.deviation) {
    validate(ClassifierParams{params_});
}

void IkfClassifier::on_sample(const GazeSample& s) {
    const auto r = kalman::ikf_step(filter_, s.position());
    const double dc = tracker_.push({r.x * rate_hz_, r.y * rate_hz_});
    commit(dc < params_.chi2_threshold ? Label::Fixation : Label::NonFixation);
}

// --- free functions --------------------------------------------------------

std::unique_ptr<OnlineClassifier> make_classifier(const ClassifierParams& params, double rate_hz) {
    if (!(rate_hz > 0.0)) throw Error("sampling rate must be positive");
    return std::visit(
        [rate_hz](const auto& p) -> std::unique_ptr<OnlineClassifier> {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, IvtParams>) return std::make_unique<IvtClassifier>(p, rate_hz);
            else if constexpr (std::is_same_v<P, IdtParams>) return std::make_unique<IdtClassifier>(p, rate_hz);
            else return std::make_unique<IkfClassifier>(p, rate_hz);
        },
        params);
}

Classification classify(std::span<const GazeSample> samples, const ClassifierParams& params, double rate_hz) {
    auto c = make_classifier(params, rate_hz);
    for (const auto& s : samples) c->push(s);
    c->finish();
    return c->result();
}

std::vector<Label> ivt_classify(std::span<const GazeSample> samples, double velocity_threshold_deg_s,
                                double rate_hz) {
    if (samples.size() < 2) throw Error("insufficient samples");
    return classify(samples, IvtParams{velocity_threshold_deg_s}, rate_hz).labels;
}

std::vector<FixationRun> idt_classify(std::span<const GazeSample> samples, double dispersion_threshold_dva,
                                      double min_duration_ms, double rate_hz) {
    return classify(samples, IdtParams{dispersion_threshold_dva, min_duration_ms}, rate_hz).runs;
}

std::vector<Label> ikf_classify(std::span<const GazeSample> samples, double chi2_threshold,
                                std::size_t window_size, double deviation, double rate_hz) {
    return classify(samples, IkfParams{chi2_threshold, window_size, deviation}, rate_hz).labels;
}

double dispersion(std::span<const GazeSample> samples) {
    if (samples.empty()) return 0.0;
    const auto [min_x, max_x] = std::minmax_element(
        samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.x_dva < b.x_dva; });
    const auto [min_y, max_y] = std::minmax_element(
        samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.y_dva < b.y_dva; });
    return (max_x->x_dva - min_x->x_dva) + (max_y->y_dva - min_y->y_dva);
}

std::vector<FixationRun> labels_to_runs(std::span<const Label> labels, std::span<const TimeMs> timestamps) {
    if (labels.size() != timestamps.size()) throw Error("labels and timestamps differ in length");
    std::vector<FixationRun> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != Label::Fixation) continue;
        if (!out.empty() && out.back().end_idx + 1 == i) {
            out.back().end_idx = i;
            out.back().end_ms = timestamps[i];
        } else {
            out.push_back({i, i, timestamps[i], timestamps[i]});
        }
    }
    return out;
}

std::vector<FixationRun> labels_to_runs(std::span<const Label> labels, std::span<const GazeSample> samples) {
    std::vector<TimeMs> times;
    times.reserve(samples.size());
    for (const auto& s : samples) times.push_back(s.t_ms);
    return labels_to_runs(labels, std::span<const TimeMs>(times));
}

void write_labels(std::ostream& out, std::span<const GazeSample> samples, std::span<const Label> labels) {
    if (samples.size() != labels.size()) throw Error("labels and samples differ in length");
    out << "t_ms,label\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out << samples[i].t_ms << ',' << (labels[i] == Label::Fixation ? 'F' : 'N') << '\n';
    }
}

}  // namespace gazesim::classify
