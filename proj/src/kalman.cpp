#include "kalman.hpp"

#include "carima/error.hpp"
#include "carima/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace carima::kalman {

ArmaSystem make_system(std::span<const double> ar, std::span<const double> ma) {
    if (!poly::roots_outside_unit_circle(poly::ar_polynomial(ar))) {
        throw Error(ErrorCode::NonStationaryParams, "AR polynomial has a root on or inside the unit circle");
    }
    ArmaSystem sys;
    sys.ar.assign(ar.begin(), ar.end());
    sys.ma.assign(ma.begin(), ma.end());
    sys.r = static_cast<int>(std::max(ar.size(), ma.size() + 1));
    const int r = sys.r;

    Eigen::MatrixXd transition = Eigen::MatrixXd::Zero(r, r);
    for (int i = 0; i < r; ++i) {
        if (i < static_cast<int>(ar.size())) transition(i, 0) = ar[static_cast<std::size_t>(i)];
        if (i + 1 < r) transition(i, i + 1) = 1.0;
    }
    Eigen::VectorXd loading = Eigen::VectorXd::Zero(r);
    loading(0) = 1.0;
    for (int i = 1; i < r; ++i) {
        if (i - 1 < static_cast<int>(ma.size())) loading(i) = ma[static_cast<std::size_t>(i - 1)];
    }
    sys.shock_cov = loading * loading.transpose();

    // Doubling: after k rounds P holds sum_{j < 2^k} T^j RR' T^j'.
    Eigen::MatrixXd p = sys.shock_cov;
    Eigen::MatrixXd power = transition;
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
        p += power * p * power.transpose();
        power = power * power;
        if (power.lpNorm<Eigen::Infinity>() < 1e-300 ||
            (power * p * power.transpose()).lpNorm<Eigen::Infinity>() <=
                1e-17 * p.lpNorm<Eigen::Infinity>()) {
            converged = true;
            break;
        }
    }
    if (!converged || !p.allFinite()) {
        throw Error(ErrorCode::NonStationaryParams, "stationary state covariance does not exist");
    }
    sys.initial_cov = 0.5 * (p + p.transpose());
    return sys;
}

FilterResult filter(const ArmaSystem& sys, const Eigen::MatrixXd& data) {
    const int r = sys.r;
    const Eigen::Index n = data.rows();
    const Eigen::Index m = data.cols();
    const int p = static_cast<int>(sys.ar.size());

    FilterResult out;
    out.std_innovations.resize(n, m);
    out.f.resize(static_cast<std::size_t>(n));

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(r, m);
    Eigen::MatrixXd cov = sys.initial_cov;
    Eigen::MatrixXd filtered_cov(r, r);
    Eigen::MatrixXd tmp(r, r);
    Eigen::MatrixXd next(r, r);
    Eigen::VectorXd gain_col(r);
    std::vector<double> filtered(static_cast<std::size_t>(r));
    std::vector<double> v(static_cast<std::size_t>(m));

    bool steady = false;
    double f = cov(0, 0);
    for (Eigen::Index t = 0; t < n; ++t) {
        if (!steady) {
            f = cov(0, 0);
            gain_col = cov.col(0);
        }
        if (!(f > 0.0) || !std::isfinite(f)) {
            throw Error(ErrorCode::NonStationaryParams, "non-positive prediction variance in filter");
        }
        out.f[static_cast<std::size_t>(t)] = f;
        out.sum_log_f += std::log(f);
        const double inv_sqrt_f = 1.0 / std::sqrt(f);

        for (Eigen::Index j = 0; j < m; ++j) {
            const double innovation = data(t, j) - a(0, j);
            out.std_innovations(t, j) = innovation * inv_sqrt_f;
            const double scale = innovation / f;
            for (int i = 0; i < r; ++i) {
                filtered[static_cast<std::size_t>(i)] = a(i, j) + gain_col(i) * scale;
            }
            // Predict: a_{t+1} = T a_{t|t}.
            const double head = filtered[0];
            for (int i = 0; i < r; ++i) {
                double acc = i < p ? sys.ar[static_cast<std::size_t>(i)] * head : 0.0;
                if (i + 1 < r) acc += filtered[static_cast<std::size_t>(i + 1)];
                a(i, j) = acc;
            }
        }

        if (steady) {
            continue;
        }
        // P_{t|t} = P - P e1 e1' P / f, then P_{t+1} = T P_{t|t} T' + RR'.
        filtered_cov.noalias() = cov - (gain_col * gain_col.transpose()) / f;
        for (int i = 0; i < r; ++i) {
            const double phi_i = i < p ? sys.ar[static_cast<std::size_t>(i)] : 0.0;
            for (int k = 0; k < r; ++k) {
                double acc = phi_i * filtered_cov(0, k);
                if (i + 1 < r) acc += filtered_cov(i + 1, k);
                tmp(i, k) = acc;
            }
        }
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < r; ++j) {
                const double phi_j = j < p ? sys.ar[static_cast<std::size_t>(j)] : 0.0;
                double acc = phi_j * tmp(i, 0);
                if (j + 1 < r) acc += tmp(i, j + 1);
                next(i, j) = acc + sys.shock_cov(i, j);
            }
        }
        const double change = (next - cov).lpNorm<Eigen::Infinity>();
        cov = next;
        if (change < 1e-15 * std::max(1.0, cov(0, 0))) {
            steady = true;
            f = cov(0, 0);
            gain_col = cov.col(0);
        }
    }
    out.next_state = std::move(a);
    out.next_cov = std::move(cov);
    return out;
}

}  // namespace carima::kalman
