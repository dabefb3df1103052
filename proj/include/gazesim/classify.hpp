#pragma once

#include "gazesim/core.hpp"
#include "gazesim/kalman.hpp"

#include <deque>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace gazesim::classify {

struct Classification {
    std::vector<Label> labels;
    std::vector<FixationRun> runs;
};

/// Causal per-sample classifier. Samples are pushed one at a time; labels
/// are committed once they can no longer change. committed() is always a
/// prefix of the labels a full pass would produce.
class OnlineClassifier {
public:
    virtual ~OnlineClassifier() = default;

    void push(const GazeSample& s);
    /// Resolves labels still pending at end of stream.
    void finish();

    const std::vector<Label>& committed() const { return labels_; }
    std::size_t consumed() const { return times_.size(); }

    /// Fixation runs over the committed labels.
    std::vector<FixationRun> runs() const;
    Classification result() const { return {labels_, runs()}; }

protected:
    virtual void on_sample(const GazeSample& s) = 0;
    virtual void on_finish() = 0;

    void commit(Label l) { labels_.push_back(l); }
    /// The next committed Fixation label opens a new run even if the
    /// previous label was Fixation too.
    void mark_run_start(std::size_t idx) { run_starts_.push_back(idx); }

private:
    std::vector<TimeMs> times_;
    std::vector<Label> labels_;
    std::vector<std::size_t> run_starts_;
};

class IvtClassifier final : public OnlineClassifier {
public:
    IvtClassifier(IvtParams params, double rate_hz);

    static double velocity(const GazeSample& prev, const GazeSample& cur, double rate_hz);

private:
    void on_sample(const GazeSample& s) override;
    void on_finish() override;

    IvtParams params_;
    double rate_hz_;
    std::size_t count_{0};
    GazeSample prev_{};
};

/// Dispersion-threshold identification (window growing), causal. A seed of
/// min-duration samples becomes a fixation when its dispersion does not
/// exceed the threshold; it then grows until a sample pushes the dispersion
/// over the threshold. That breaking sample seeds the next window.
class IdtClassifier final : public OnlineClassifier {
public:
    IdtClassifier(IdtParams params, double rate_hz);

    std::size_t seed_size() const { return seed_size_; }

private:
    void on_sample(const GazeSample& s) override;
    void on_finish() override;

    double window_dispersion() const;
    void restart_window(std::size_t start);
    void push_extrema(std::size_t idx);
    void drop_before(std::size_t start);

    IdtParams params_;
    std::size_t seed_size_;
    std::vector<Point> points_;
    std::size_t start_{0};
    bool in_fixation_{false};
    std::deque<std::size_t> max_x_, min_x_, max_y_, min_y_;
};

/// Kalman-filter identification: per-channel constant-velocity filters feed
/// a sliding chi-square statistic over the innovations, expressed in deg/s
/// (innovation * rate). A sample is a fixation iff the windowed statistic is
/// below the threshold.
class IkfClassifier final : public OnlineClassifier {
public:
    IkfClassifier(IkfParams params, double rate_hz);

    double last_statistic() const { return tracker_.window_delta(); }

private:
    void on_sample(const GazeSample& s) override;
    void on_finish() override {}

    IkfParams params_;
    double rate_hz_;
    kalman::KalmanState filter_;
    kalman::Chi2Tracker tracker_;
};

std::unique_ptr<OnlineClassifier> make_classifier(const ClassifierParams& params, double rate_hz);

/// Full pass: push every sample, then finish.
Classification classify(std::span<const GazeSample> samples, const ClassifierParams& params, double rate_hz);

std::vector<Label> ivt_classify(std::span<const GazeSample> samples, double velocity_threshold_deg_s, double rate_hz);
std::vector<FixationRun> idt_classify(std::span<const GazeSample> samples, double dispersion_threshold_dva,
                                      double min_duration_ms, double rate_hz);
std::vector<Label> ikf_classify(std::span<const GazeSample> samples, double chi2_threshold,
                                std::size_t window_size, double deviation, double rate_hz);

/// [max(x) - min(x)] + [max(y) - min(y)]; zero for an empty span.
double dispersion(std::span<const GazeSample> samples);

/// Maximal contiguous Fixation spans.
std::vector<FixationRun> labels_to_runs(std::span<const Label> labels, std::span<const TimeMs> timestamps);
std::vector<FixationRun> labels_to_runs(std::span<const Label> labels, std::span<const GazeSample> samples);

/// CSV "t_ms,label" with label F or N.
void write_labels(std::ostream& out, std::span<const GazeSample> samples, std::span<const Label> labels);

}  // namespace gazesim::classify
