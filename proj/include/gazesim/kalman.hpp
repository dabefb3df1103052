#pragma once

#include "gazesim/core.hpp"

#include <Eigen/Dense>

#include <deque>

namespace gazesim::kalman {

// Constant-velocity model for one gaze channel:
//   state [position, velocity], F = [[1, dt], [0, 1]], H = [1, 0],
//   Q = I, R = 1, P0 = I, x0 = 0, K0 = 0.
struct ChannelFilter {
    Eigen::Vector2d state{Eigen::Vector2d::Zero()};
    Eigen::Matrix2d covariance{Eigen::Matrix2d::Identity()};
    Eigen::Vector2d gain{Eigen::Vector2d::Zero()};
    Eigen::Matrix2d transition{Eigen::Matrix2d::Identity()};
    Eigen::Matrix2d process_noise{Eigen::Matrix2d::Identity()};
    double measurement_noise{1.0};

    explicit ChannelFilter(double dt_s);

    /// Predict, then update with one position measurement. Returns the
    /// innovation z - H x_prior.
    double step(double measurement);
};

/// Two independent per-channel filters (horizontal, vertical).
struct KalmanState {
    ChannelFilter x;
    ChannelFilter y;

    explicit KalmanState(double rate_hz);
};

struct Residual {
    double x{0.0};
    double y{0.0};
};

/// Advances both channels by one measurement; returns pred - meas per channel
/// expressed as the innovation z - H x_prior.
Residual ikf_step(KalmanState& state, Point measurement);

/// Sliding-window chi-square statistic over squared residuals:
///   c(t)  = sum_{i<=t} (rx_i^2 + ry_i^2) / deviation
///   dc(t) = c(t) - c(t - window)           (c(k) = 0 for k < 0)
/// dc is evaluated as the windowed sum of the stored per-step squared
/// residuals, divided once by the deviation, so it never suffers from
/// cancellation against a large running total.
class Chi2Tracker {
public:
    Chi2Tracker(std::size_t window_size, double deviation);

    /// Adds one step and returns dc(t).
    double push(Residual r);

    double cumulative() const { return cumulative_; }
    double window_delta() const { return delta_; }
    std::size_t buffered() const { return squares_.size(); }

private:
    std::size_t window_;
    double deviation_;
    std::deque<double> squares_;
    double cumulative_{0.0};
    double delta_{0.0};
};

}  // namespace gazesim::kalman
