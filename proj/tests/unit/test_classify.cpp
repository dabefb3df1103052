#include "gazesim/classify.hpp"
#include "gazesim/ingest.hpp"
#include "gazesim/stream.hpp"

#include "../oracles.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace gazesim;
using namespace gazesim::classify;

namespace {

std::vector<GazeSample> trace(const std::vector<Point>& pts) {
    std::vector<GazeSample> s;
    for (std::size_t i = 0; i < pts.size(); ++i) s.push_back({static_cast<TimeMs>(i), pts[i].x, pts[i].y, true});
    return s;
}

std::vector<GazeSample> linear(std::size_t n, double dx, double dy) {
    std::vector<Point> p;
    for (std::size_t i = 0; i < n; ++i) p.push_back({dx * static_cast<double>(i), dy * static_cast<double>(i)});
    return trace(p);
}

std::vector<GazeSample> constant(std::size_t n, Point p) {
    return trace(std::vector<Point>(n, p));
}

std::vector<std::pair<std::size_t, std::size_t>> spans(const std::vector<FixationRun>& runs) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& r : runs) out.emplace_back(r.start_idx, r.end_idx);
    return out;
}

const std::vector<ClassifierParams> kDefaults{IvtParams{}, IdtParams{}, IkfParams{}};

}  // namespace

TEST_SUITE("classify") {

TEST_CASE("IVT velocity is the backward difference times the rate") {
    const auto s = linear(10, 0.03, 0.04);
    CHECK(IvtClassifier::velocity(s[0], s[1], 1000.0) == doctest::Approx(50.0).epsilon(1e-12));
    for (auto l : ivt_classify(s, 30.0, 1000.0)) CHECK(l == Label::NonFixation);
}

TEST_CASE("IVT labels a still trace as fixation") {
    for (auto l : ivt_classify(constant(50, {3, -2}), 30.0, 1000.0)) CHECK(l == Label::Fixation);
}

TEST_CASE("IVT threshold is strict") {
    for (auto l : ivt_classify(linear(10, 0.029, 0.0), 30.0, 1000.0)) CHECK(l == Label::Fixation);
    // 0.25 dva per sample at 120 Hz is exactly 30 deg/s: not below the threshold.
    for (auto l : ivt_classify(linear(10, 0.25, 0.0), 30.0, 120.0)) CHECK(l == Label::NonFixation);
}

TEST_CASE("IVT first sample inherits the second label") {
    auto s = constant(5, {0, 0});
    s[1].x_dva = 1.0;  // big jump at 1, back at 2
    const auto l = ivt_classify(s, 30.0, 1000.0);
    CHECK(l[0] == Label::NonFixation);
    CHECK(l[1] == Label::NonFixation);
    CHECK(l[2] == Label::NonFixation);
    CHECK(l[3] == Label::Fixation);
}

TEST_CASE("IVT needs two samples") {
    CHECK_THROWS_WITH_AS(ivt_classify(constant(1, {0, 0}), 30.0, 1000.0), "insufficient samples", Error);
    CHECK_THROWS_WITH_AS(classify::classify(constant(1, {0, 0}), IvtParams{}, 1000.0), "insufficient samples", Error);
}

TEST_CASE("IVT velocities scale with positions and ignore offsets") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const auto rec = oracle::random_recording(rng, {2000});
        const auto& s = rec.samples;
        auto scaled = s;
        auto shifted = s;
        for (auto& g : scaled) {
            g.x_dva *= 3.0;
            g.y_dva *= 3.0;
        }
        for (auto& g : shifted) {
            g.x_dva += 4.0;
            g.y_dva -= 2.0;
        }
        for (std::size_t i = 1; i < s.size(); i += 37) {
            CHECK(IvtClassifier::velocity(scaled[i - 1], scaled[i], 1000.0) ==
                  doctest::Approx(3.0 * IvtClassifier::velocity(s[i - 1], s[i], 1000.0)).epsilon(1e-9));
        }
        CHECK(ivt_classify(shifted, 30.0, 1000.0) == ivt_classify(s, 30.0, 1000.0));
        CHECK(ivt_classify(s, 30.0, 1000.0) == oracle::ivt_labels(s, 30.0, 1000.0));
    }
}

TEST_CASE("IDT dispersion formula with the non-strict boundary") {
    const std::vector<GazeSample> w{{0, 1.0, 2.0, true}, {1, 1.2, 2.0, true}, {2, 1.1, 2.3, true}};
    CHECK(dispersion(w) == doctest::Approx(0.5).epsilon(1e-12));
    const auto example_runs = idt_classify(w, 0.5, 3.0, 1000.0);
    REQUIRE(example_runs.size() == 1);
    CHECK(example_runs[0].end_idx == 2);
    const std::vector<GazeSample> exact{{0, 1.0, 2.0, true}, {1, 1.25, 2.0, true}, {2, 1.125, 2.25, true}};
    CHECK(dispersion(exact) == 0.5);
    const auto runs = idt_classify(exact, 0.5, 3.0, 1000.0);
    REQUIRE(runs.size() == 1);
    CHECK(runs[0].start_idx == 0);
    CHECK(runs[0].end_idx == 2);
}

TEST_CASE("IDT on a still trace gives one run over everything") {
    const auto runs = idt_classify(constant(100, {1, 1}), 0.5, 30.0, 1000.0);
    REQUIRE(runs.size() == 1);
    CHECK(runs[0].start_idx == 0);
    CHECK(runs[0].end_idx == 99);
    CHECK(runs[0].duration_ms() == 99);
}

TEST_CASE("IDT splits at a step") {
    std::vector<Point> p(60, {0, 0});
    for (std::size_t i = 30; i < 60; ++i) p[i] = {2, 0};
    const auto s = trace(p);
    const auto runs = idt_classify(s, 0.5, 10.0, 1000.0);
    CHECK(spans(runs) == oracle::idt_runs(s, 0.5, 10.0, 1000.0));
    REQUIRE(runs.size() == 2);
    CHECK(runs[0].end_idx == 29);
    CHECK(runs[1].start_idx == 30);
    CHECK(runs[1].end_idx == 59);
}

TEST_CASE("IDT matches the brute-force dispersion scan") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> thr(0.2, 1.5);
    std::uniform_real_distribution<double> dur(5, 80);
    for (int trial = 0; trial < 60; ++trial) {
        auto rec = oracle::random_recording(rng, {3000});
        const double t = thr(rng), d = dur(rng);
        const auto runs = idt_classify(rec.samples, t, d, 1000.0);
        CHECK(spans(runs) == oracle::idt_runs(rec.samples, t, d, 1000.0));
        for (const auto& r : runs) {
            const std::span<const GazeSample> all(rec.samples);
            CHECK(dispersion(all.subspan(r.start_idx, r.end_idx - r.start_idx + 1)) <= t);
            if (r.end_idx + 1 < rec.samples.size()) {
                CHECK(dispersion(all.subspan(r.start_idx, r.end_idx - r.start_idx + 2)) > t);
            }
        }
    }
}

TEST_CASE("IDT seed size follows the ceil rule at other rates") {
    CHECK(IdtClassifier(IdtParams{0.5, 30}, 1000.0).seed_size() == 30);
    CHECK(IdtClassifier(IdtParams{0.5, 30}, 60.0).seed_size() == 2);
    CHECK(IdtClassifier(IdtParams{0.5, 30}, 250.0).seed_size() == 8);
}

TEST_CASE("IDT dispersion is translation invariant") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        auto rec = oracle::random_recording(rng, {2000});
        auto shifted = rec.samples;
        for (auto& g : shifted) {
            g.x_dva += 0.5;
            g.y_dva -= 0.25;
        }
        CHECK(dispersion(shifted) == doctest::Approx(dispersion(rec.samples)).epsilon(1e-12));
    }
}

TEST_CASE("IKF stays fixation on a converged still trace") {
    const auto s = constant(600, {5, -3});
    const auto labels = ikf_classify(s, 3.75, 5, 1000, 1000.0);
    for (std::size_t i = 200; i < labels.size(); ++i) REQUIRE(labels[i] == Label::Fixation);
}

TEST_CASE("IKF matches the reference filter labels") {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 40; ++trial) {
        const auto rec = oracle::random_recording(rng, {3000});
        CHECK(ikf_classify(rec.samples, 3.75, 5, 1000, 1000.0) ==
              oracle::ikf_labels(rec.samples, 3.75, 5, 1000, 1000.0));
    }
}

TEST_CASE("labels_to_runs") {
    using L = Label;
    const std::vector<TimeMs> t{0, 1, 2, 3};
    const std::vector<L> a{L::Fixation, L::Fixation, L::NonFixation, L::Fixation};
    CHECK(spans(labels_to_runs(a, t)) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {3, 3}});
    CHECK(labels_to_runs(std::vector<L>(4, L::NonFixation), t).empty());
    const auto all = labels_to_runs(std::vector<L>(4, L::Fixation), t);
    REQUIRE(all.size() == 1);
    CHECK(all[0].start_ms == 0);
    CHECK(all[0].end_ms == 3);
}

TEST_CASE("runs agree with labels for every classifier") {
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rec = oracle::random_recording(rng, {4000});
        for (const auto& p : kDefaults) {
            const auto c = classify::classify(rec.samples, p, 1000.0);
            REQUIRE(c.labels.size() == rec.samples.size());
            for (const auto& r : c.runs) {
                for (std::size_t i = r.start_idx; i <= r.end_idx; ++i) REQUIRE(c.labels[i] == Label::Fixation);
            }
            std::size_t covered = 0;
            for (const auto& r : c.runs) covered += r.end_idx - r.start_idx + 1;
            CHECK(covered == static_cast<std::size_t>(std::count(c.labels.begin(), c.labels.end(), Label::Fixation)));
        }
    }
}

TEST_CASE("committed labels are always a prefix of the full pass") {
    std::mt19937_64 rng(26);
    for (int trial = 0; trial < 30; ++trial) {
        const auto rec = oracle::random_recording(rng, {3000, 1000.0, 0.003});
        const auto filled = stream::fill_forward(rec);
        for (const auto& p : kDefaults) {
            const auto full = classify::classify(filled, p, 1000.0);
            auto online = make_classifier(p, 1000.0);
            std::size_t checked = 0;
            for (std::size_t i = 0; i < filled.size(); ++i) {
                online->push(filled[i]);
                const auto& c = online->committed();
                REQUIRE(c.size() <= i + 1);
                REQUIRE(c.size() >= checked);
                for (; checked < c.size(); ++checked) REQUIRE(c[checked] == full.labels[checked]);
            }
            std::uniform_int_distribution<std::size_t> cut(2, filled.size());
            const std::size_t k = cut(rng);
            const auto prefix = classify::classify(std::span(filled).first(k), p, 1000.0);
            if (algorithm_of(p) != Algorithm::Idt) {
                CHECK(std::equal(prefix.labels.begin(), prefix.labels.end(), full.labels.begin()));
            }
        }
    }
}

TEST_CASE("noise-free synthetic: steady samples fixation, mid-saccade not") {
    ingest::SynthConfig cfg;
    cfg.n_targets = 40;
    const auto syn = ingest::synthesize_recording(cfg);
    const auto& rec = syn.recording;
    for (const auto& p : kDefaults) {
        const auto labels = classify::classify(rec.samples, p, rec.rate_hz).labels;
        for (const auto& t : rec.targets) {
            const auto on = static_cast<std::size_t>(t.onset_ms);
            // Mid-saccade samples, more than 0.5 dva from both ramp ends.
            for (std::size_t i = on + 212; i < on + 228; ++i) CHECK(labels[i] == Label::NonFixation);
            // Steady post-saccade samples. The IKF velocity estimate needs up to
            // about 380 ms after a 30 dva saccade before the statistic drops.
            const std::size_t settle = algorithm_of(p) == Algorithm::Ikf ? 700 : 300;
            for (std::size_t i = on + settle; i < on + 1000; ++i) {
                INFO(to_string(algorithm_of(p)), " target ", t.index, " offset ", i - on);
                REQUIRE(labels[i] == Label::Fixation);
            }
        }
    }
}

TEST_CASE("label dump format") {
    const auto s = constant(3, {0, 0});
    const std::vector<Label> l{Label::Fixation, Label::NonFixation, Label::Fixation};
    std::ostringstream out;
    write_labels(out, s, l);
    CHECK(out.str() == "t_ms,label\n0,F\n1,N\n2,F\n");
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(make_classifier(IvtParams{-1}, 1000.0), Error);
    CHECK_THROWS_AS(make_classifier(IkfParams{3.75, 1, 1000}, 1000.0), Error);
    CHECK_THROWS_AS(make_classifier(IvtParams{}, 0.0), Error);
}

}
