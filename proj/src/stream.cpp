#include "gazesim/stream.hpp"

#include <thread>

namespace gazesim::stream {

StreamCursor::StreamCursor(const Recording& rec, bool pace) : rec_(&rec), pace_(pace) {
    if (pace_) start_ = std::chrono::steady_clock::now();
}

std::optional<GazeSample> StreamCursor::next_sample() {
    if (next_ >= rec_->samples.size()) return std::nullopt;
    GazeSample s = rec_->samples[next_++];
    if (pace_) std::this_thread::sleep_until(start_ + std::chrono::milliseconds(s.t_ms));
    if (s.valid) {
        last_valid_ = s.position();
    } else {
        s.x_dva = last_valid_.x;
        s.y_dva = last_valid_.y;
    }
    return s;
}

std::vector<GazeSample> StreamCursor::stream_window(TimeMs from_ms, TimeMs to_ms) {
    std::vector<GazeSample> out;
    while (next_ < rec_->samples.size() && rec_->samples[next_].t_ms < to_ms) {
        const auto s = next_sample();
        if (s->t_ms >= from_ms) out.push_back(*s);
    }
    return out;
}

std::vector<GazeSample> fill_forward(const Recording& rec, bool pace) {
    StreamCursor cursor(rec, pace);
    std::vector<GazeSample> out;
    out.reserve(rec.samples.size());
    while (auto s = cursor.next_sample()) out.push_back(*s);
    return out;
}

}  // namespace gazesim::stream
