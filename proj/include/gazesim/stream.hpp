#pragma once

#include "gazesim/core.hpp"

#include <chrono>
#include <optional>
#include <vector>

namespace gazesim::stream {

/// Replays a recording sample by sample, forward-filling missing gaze with
/// the most recent valid point ((0,0) before the first valid sample).
/// Fill state spans the whole recording; it is never reset at target
/// boundaries. The emitted sample keeps the raw validity flag.
///
/// Single consumer. The recording must outlive the cursor.
class StreamCursor {
public:
    explicit StreamCursor(const Recording& rec, bool pace = false);

    /// Next filled sample, or nullopt at end of stream.
    std::optional<GazeSample> next_sample();

    /// Consumes samples with t < to_ms and returns those with t >= from_ms.
    /// Samples already consumed are not returned again.
    std::vector<GazeSample> stream_window(TimeMs from_ms, TimeMs to_ms);

    bool exhausted() const { return next_ >= rec_->samples.size(); }
    std::size_t position() const { return next_; }
    Point last_valid() const { return last_valid_; }

private:
    const Recording* rec_;
    std::size_t next_{0};
    Point last_valid_{};
    bool pace_{false};
    std::chrono::steady_clock::time_point start_{};
};

/// One full causal pass over the recording.
std::vector<GazeSample> fill_forward(const Recording& rec, bool pace = false);

}  // namespace gazesim::stream
