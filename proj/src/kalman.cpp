#include "gazesim/kalman.hpp"

namespace gazesim::kalman {

ChannelFilter::ChannelFilter(double dt_s) {
    transition(0, 1) = dt_s;
}

double ChannelFilter::step(double measurement) {
    const Eigen::Vector2d prior = transition * state;
    const Eigen::Matrix2d prior_cov = transition * covariance * transition.transpose() + process_noise;

    // H = [1, 0], so H P H^T is the position variance and P H^T its column.
    const double innovation = measurement - prior(0);
    const double innovation_var = prior_cov(0, 0) + measurement_noise;
    gain = prior_cov.col(0) / innovation_var;

    state = prior + gain * innovation;
    Eigen::Matrix2d ikh = Eigen::Matrix2d::Identity();
    ikh.col(0) -= gain;
    covariance = ikh * prior_cov;
    covariance = 0.5 * (covariance + covariance.transpose()).eval();
    return innovation;
}

KalmanState::KalmanState(double rate_hz) : x(1.0 / rate_hz), y(1.0 / rate_hz) {}

Residual ikf_step(KalmanState& state, Point measurement) {
    return {state.x.step(measurement.x), state.y.step(measurement.y)};
}

Chi2Tracker::Chi2Tracker(std::size_t window_size, double deviation)
    : window_(window_size), deviation_(deviation) {
    if (window_ < 1) throw Error("chi-square window must be positive");
    if (!(deviation_ > 0.0)) throw Error("deviation must be positive");
}

double Chi2Tracker::push(Residual r) {
    const double sq = r.x * r.x + r.y * r.y;
    squares_.push_back(sq);
    if (squares_.size() > window_) squares_.pop_front();
    cumulative_ += sq / deviation_;
    // Extended precision keeps a window of equal terms exactly w * term.
    long double sum = 0.0L;
    for (double v : squares_) sum += v;
    delta_ = static_cast<double>(sum) / deviation_;
    return delta_;
}

}  // namespace gazesim::kalman
