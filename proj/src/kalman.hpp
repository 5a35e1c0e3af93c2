#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace carima::kalman {

// Exact Gaussian filtering of a zero-mean ARMA process written in Harvey's
// state-space form: state dimension r = max(p, q + 1), transition matrix with
// the AR coefficients in the first column and a shifted identity to its right,
// shock loading (1, theta_1, ..., theta_{r-1}), observation picks element 0.
// The shock variance is 1 here; callers scale by sigma^2.

struct ArmaSystem {
    std::vector<double> ar;
    std::vector<double> ma;
    int r = 1;
    Eigen::MatrixXd shock_cov;   // R R'
    Eigen::MatrixXd initial_cov; // stationary solution of P = T P T' + R R'
};

/// Throws Error(NonStationaryParams) when the AR part is not stationary.
[[nodiscard]] ArmaSystem make_system(std::span<const double> ar, std::span<const double> ma);

struct FilterResult {
    Eigen::MatrixXd std_innovations; // n x m, v_t / sqrt(f_t)
    std::vector<double> f;           // prediction-error variance factors
    double sum_log_f = 0.0;
    Eigen::MatrixXd next_state;      // r x m, a_{n+1|n}
    Eigen::MatrixXd next_cov;        // r x r, P_{n+1|n}
};

/// Filters every column of `data` (n x m) through the same system; the
/// covariance recursion is shared because it does not depend on the data.
[[nodiscard]] FilterResult filter(const ArmaSystem& sys, const Eigen::MatrixXd& data);

}  // namespace carima::kalman
