#include "gazesim/ingest.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace gazesim;
using namespace gazesim::ingest;

namespace {

Recording parse(const std::string& text, const CsvSchema& schema = {}) {
    std::istringstream in(text);
    return parse_recording(in, schema, {"s", "1"});
}

bool same_samples(const std::vector<GazeSample>& a, const std::vector<GazeSample>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].t_ms != b[i].t_ms || a[i].valid != b[i].valid) return false;
        if (a[i].valid && (a[i].x_dva != b[i].x_dva || a[i].y_dva != b[i].y_dva)) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("missing gaze marks the sample invalid and counts toward data loss") {
    const auto rec = parse("n,x,y,xT,yT\n0,1.0,1.0,0,0\n1,NaN,NaN,0,0\n2,2.0,2.0,0,0\n");
    REQUIRE(rec.samples.size() == 3);
    CHECK(rec.data_loss_pct == doctest::Approx(100.0 / 3.0).epsilon(1e-12));
    CHECK_FALSE(rec.samples[1].valid);
    CHECK(rec.samples[0].valid);
    CHECK(rec.samples[2].valid);
}

TEST_CASE("missing token is case-insensitive and empty fields are missing") {
    const auto rec = parse("n,x,y,xT,yT\n0,nan,1,0,0\n1,,1,0,0\n2,1,NAN,0,0\n3,1,1,0,0\n");
    CHECK_FALSE(rec.samples[0].valid);
    CHECK_FALSE(rec.samples[1].valid);
    CHECK_FALSE(rec.samples[2].valid);
    CHECK(rec.samples[3].valid);
    CHECK(rec.data_loss_pct == 75.0);
}

TEST_CASE("a single change of target position gives two segments") {
    const auto rec = parse("n,x,y,xT,yT\n0,0,0,1,1\n1,0,0,1,1\n2,0,0,1,1\n3,0,0,5,-2\n4,0,0,5,-2\n");
    REQUIRE(rec.targets.size() == 2);
    CHECK(rec.targets[0].onset_ms == 0);
    CHECK(rec.targets[0].offset_ms == 3);
    CHECK(rec.targets[1].onset_ms == 3);
    CHECK(rec.targets[1].offset_ms == 5);
    CHECK(rec.targets[1].x_dva == 5.0);
    CHECK(rec.targets[1].y_dva == -2.0);
    CHECK(rec.targets[1].index == 1);
}

TEST_CASE("timestamps are normalized and the rate follows the median step") {
    const auto rec = parse("n,x,y,xT,yT\n1000,0,0,0,0\n1004,0,0,0,0\n1008,0,0,0,0\n1012,0,0,0,0\n");
    CHECK(rec.samples.front().t_ms == 0);
    CHECK(rec.samples.back().t_ms == 12);
    CHECK(rec.rate_hz == 250.0);
    CHECK(rec.sample_period_ms() == 4);
}

TEST_CASE("schema overrides by name and by index") {
    const std::string text = "a,gx,gy,tx,ty,extra\n0,1,2,3,4,z\n1,1,2,3,4,z\n";
    const auto by_name = parse(text, CsvSchema::from_string("a,gx,gy,tx,ty"));
    CHECK(by_name.samples[0].x_dva == 1.0);
    CHECK(by_name.targets[0].y_dva == 4.0);
    const auto by_index = parse(text, CsvSchema::from_string("0,2,1,3,4"));
    CHECK(by_index.samples[0].x_dva == 2.0);
    CHECK(by_index.samples[0].y_dva == 1.0);
    CHECK_THROWS_AS(CsvSchema::from_string("a,b,c"), Error);
    CHECK_THROWS_AS(parse(text, CsvSchema::from_string("a,a,gy,tx,ty")), Error);
}

TEST_CASE("malformed input is rejected") {
    CHECK_THROWS_WITH_AS(parse("n,x,y,xT,yT\n0,0,0,0,0\n1,abc,0,0,0\n"), "line 3: bad gaze value", Error);
    CHECK_THROWS_WITH_AS(parse("n,x,y,xT,yT\n0,0,0,0,0\n1,0,0\n"), doctest::Contains("line 3"), Error);
    CHECK_THROWS_WITH_AS(parse("n,x,y,xT,yT\n5,0,0,0,0\n5,0,0,0,0\n"), doctest::Contains("non-monotone"), Error);
    CHECK_THROWS_WITH_AS(parse("n,x,y,xT,yT\n0,0,0,0,0\n"), doctest::Contains("at least 2 samples"), Error);
    CHECK_THROWS_AS(parse(""), Error);
    CHECK_THROWS_WITH_AS(parse("n,x,y,q,yT\n0,0,0,0,0\n"), doctest::Contains("'xT'"), Error);
}

TEST_CASE("segment_targets run-length rule") {
    SUBCASE("constant position") {
        const std::vector<TimedPosition> p{{0, 1, 1}, {1, 1, 1}, {2, 1, 1}};
        const auto segs = segment_targets(p, 1);
        REQUIRE(segs.size() == 1);
        CHECK(segs[0].onset_ms == 0);
        CHECK(segs[0].offset_ms == 3);
    }
    SUBCASE("A,A,B,B") {
        const std::vector<TimedPosition> p{{0, 1, 1}, {1, 1, 1}, {2, 4, 0}, {3, 4, 0}};
        const auto segs = segment_targets(p, 1);
        REQUIRE(segs.size() == 2);
        CHECK(segs[0].onset_ms == 0);
        CHECK(segs[0].offset_ms == 2);
        CHECK(segs[1].onset_ms == 2);
        CHECK(segs[1].offset_ms == 4);
    }
    SUBCASE("tiny change is still a new segment") {
        const std::vector<TimedPosition> p{{0, 1, 1}, {1, 1 + 1e-12, 1}};
        CHECK(segment_targets(p, 1).size() == 2);
    }
}

TEST_CASE("file stems map to subject and session") {
    const auto ids = ids_from_filename("/data/S_1001_S1_RAN.csv");
    CHECK(ids.subject_id == "1001");
    CHECK(ids.session_id == "S1");
    const auto other = ids_from_filename("trial7.csv");
    CHECK(other.subject_id == "trial7");
    CHECK(other.session_id.empty());
}

TEST_CASE("serialize then parse round-trips samples, targets and validity") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SynthConfig cfg;
        cfg.n_targets = 12;
        cfg.rng_seed = seed;
        cfg.fixation_noise_sd_dva = 0.3;
        cfg.nan_rate = 0.05;
        cfg.rate_hz = seed % 2 ? 1000.0 : 500.0;
        const auto rec = synthesize_recording(cfg).recording;
        std::stringstream ss;
        write_recording(ss, rec);
        const auto back = parse_recording(ss, {}, {rec.subject_id, rec.session_id});
        CHECK(same_samples(rec.samples, back.samples));
        CHECK(rec.targets == back.targets);
        CHECK(back.rate_hz == rec.rate_hz);
        CHECK(back.data_loss_pct == rec.data_loss_pct);
    }
}

TEST_CASE("noise-free synthesis lands exactly on target after the saccade") {
    SynthConfig cfg;
    cfg.n_targets = 30;
    const auto s = synthesize_recording(cfg);
    const auto& rec = s.recording;
    REQUIRE(rec.targets.size() == 30);
    CHECK(rec.data_loss_pct == 0.0);
    const std::size_t settle = static_cast<std::size_t>(cfg.saccade_latency_ms + cfg.saccade_duration_ms);
    for (const auto& t : rec.targets) {
        for (auto i = static_cast<std::size_t>(t.onset_ms) + settle; i < static_cast<std::size_t>(t.offset_ms); ++i) {
            REQUIRE(rec.samples[i].x_dva == t.x_dva);
            REQUIRE(rec.samples[i].y_dva == t.y_dva);
        }
        CHECK(std::abs(t.x_dva) <= cfg.target_x_range_dva);
        CHECK(std::abs(t.y_dva) <= cfg.target_y_range_dva);
        CHECK(t.offset_ms - t.onset_ms == 1000);
    }
}

TEST_CASE("calibration offset shifts every steady sample by the offset") {
    SynthConfig cfg;
    cfg.n_targets = 10;
    cfg.calibration_offset_dva = {18.15, 0.0};
    const auto rec = synthesize_recording(cfg).recording;
    for (const auto& t : rec.targets) {
        const auto i = static_cast<std::size_t>(t.offset_ms) - 1;
        const Point g = rec.samples[i].position();
        CHECK(euclidean_distance(g, t.position()) == doctest::Approx(18.15).epsilon(1e-12));
    }
}

TEST_CASE("synthesis is deterministic for a fixed seed") {
    SynthConfig cfg;
    cfg.n_targets = 8;
    cfg.fixation_noise_sd_dva = 0.5;
    cfg.nan_rate = 0.1;
    std::stringstream a, b;
    write_recording(a, synthesize_recording(cfg).recording);
    write_recording(b, synthesize_recording(cfg).recording);
    CHECK(a.str() == b.str());
    cfg.rng_seed = 2;
    std::stringstream c;
    write_recording(c, synthesize_recording(cfg).recording);
    CHECK(a.str() != c.str());
}

TEST_CASE("successive target displacement respects the minimum") {
    for (double min_d : {2.0, 5.0, 10.0}) {
        SynthConfig cfg;
        cfg.n_targets = 200;
        cfg.min_displacement_dva = min_d;
        cfg.rng_seed = static_cast<std::uint64_t>(min_d * 7);
        const auto rec = synthesize_recording(cfg).recording;
        for (std::size_t i = 1; i < rec.targets.size(); ++i) {
            CHECK(euclidean_distance(rec.targets[i].position(), rec.targets[i - 1].position()) >= min_d);
        }
    }
}

TEST_CASE("infeasible displacement is reported") {
    SynthConfig cfg;
    cfg.n_targets = 3;
    cfg.target_x_range_dva = 0.5;
    cfg.target_y_range_dva = 0.5;
    cfg.min_displacement_dva = 5.0;
    CHECK_THROWS_WITH_AS(synthesize_recording(cfg), doctest::Contains("displacement"), Error);
}

TEST_CASE("observed loss stays within 3 sigma of the binomial bound") {
    for (double p : {0.0, 0.01, 0.1, 0.5}) {
        SynthConfig cfg;
        cfg.n_targets = 20;  // 20000 samples
        cfg.nan_rate = p;
        cfg.rng_seed = 99;
        const auto rec = synthesize_recording(cfg).recording;
        const auto n = static_cast<double>(rec.samples.size());
        REQUIRE(n >= 1e4);
        const double sigma_pct = 100.0 * std::sqrt(p * (1 - p) / n);
        CHECK(std::abs(rec.data_loss_pct - 100.0 * p) <= 3.0 * sigma_pct);
        if (p == 0.0) CHECK(rec.data_loss_pct == 0.0);
    }
}

TEST_CASE("truth labels mark saccade and drift samples") {
    SynthConfig cfg;
    cfg.n_targets = 5;
    cfg.drift_velocity_deg_s = 35.0;
    cfg.drift_duration_ms = 50.0;
    const auto s = synthesize_recording(cfg);
    REQUIRE(s.truth.size() == s.recording.samples.size());
    for (const auto& t : s.recording.targets) {
        const auto on = static_cast<std::size_t>(t.onset_ms);
        CHECK(s.truth[on + 199] == Label::Fixation);
        CHECK(s.truth[on + 200] == Label::NonFixation);
        CHECK(s.truth[on + 239] == Label::NonFixation);
        CHECK(s.truth[on + 240] == Label::Fixation);
        CHECK(s.truth[on + 949] == Label::Fixation);
        CHECK(s.truth[on + 950] == Label::NonFixation);
    }
}

TEST_CASE("mask_interval drops samples and refreshes loss") {
    SynthConfig cfg;
    cfg.n_targets = 2;
    auto rec = synthesize_recording(cfg).recording;
    mask_interval(rec, 1000, 2000);
    CHECK(rec.data_loss_pct == 50.0);
    CHECK_FALSE(rec.samples[1500].valid);
    CHECK(rec.samples[999].valid);
}

}
