#pragma once

#include "gazesim/classify.hpp"
#include "gazesim/core.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace gazesim::interact {

/// Distances closer than this are treated as a tie; the earlier window wins.
inline constexpr double kTieToleranceDva = 1e-9;

struct CandidateWindow {
    std::size_t start_idx{0};
    std::size_t end_idx{0};  // inclusive
    Point centroid{};
    double distance_dva{0.0};
};

/// Every dwell-length sub-window of every fixation run that lies entirely
/// inside [onset, onset + buffer_ms). Windows never span two runs.
std::vector<CandidateWindow> enumerate_candidates(std::span<const FixationRun> runs,
                                                  std::span<const GazeSample> samples,
                                                  const TargetSegment& target, double dwell_ms,
                                                  double buffer_ms, double rate_hz);

/// Minimal distance; among windows within kTieToleranceDva of the minimum the
/// earliest start wins.
std::optional<CandidateWindow> select_rank1(std::span<const CandidateWindow> candidates);

struct TargetResult {
    std::size_t target_index{0};
    std::optional<TriggerEvent> event;
};

struct Simulation {
    std::vector<GazeSample> filled;
    classify::Classification classification;
    std::vector<TargetResult> results;
};

/// Trigger-events for an already classified stream. Reused by sweeps that
/// vary only dwell/buffer.
std::vector<TargetResult> define_trigger_events(const Recording& rec, std::span<const GazeSample> filled,
                                                std::span<const FixationRun> runs, double dwell_ms,
                                                double buffer_ms, OffsetMode mode);

/// Replays the recording, classifies it in one continuous causal pass and
/// selects the Rank-1 dwell window for every target.
Simulation simulate(const Recording& rec, const SimConfig& cfg, bool pace = false);
std::vector<TargetResult> simulate_recording(const Recording& rec, const SimConfig& cfg);

/// CSV dump of the defined trigger-events.
void write_trigger_events(std::ostream& out, std::span<const TargetResult> results);

}  // namespace gazesim::interact
