#include "optimize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace carima::optim {

namespace {

using Vec = Eigen::VectorXd;

double call(const Objective& f, const Vec& x, int& evals) {
    ++evals;
    const double v = f(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

Vec to_vec(const std::vector<double>& x) {
    return Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size()));
}

std::vector<double> to_std(const Vec& x) { return {x.data(), x.data() + x.size()}; }

}  // namespace

Result nelder_mead(const Objective& f, std::vector<double> x0, double step, int max_evals,
                   double ftol) {
    const auto n = static_cast<Eigen::Index>(x0.size());
    Result out;
    if (n == 0) {
        out.value = f({});
        out.evaluations = 1;
        out.converged = true;
        return out;
    }
    std::vector<Vec> simplex(static_cast<std::size_t>(n + 1), to_vec(x0));
    std::vector<double> fv(simplex.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        simplex[static_cast<std::size_t>(i + 1)](i) += step;
    }
    int evals = 0;
    for (std::size_t i = 0; i < simplex.size(); ++i) fv[i] = call(f, simplex[i], evals);

    std::vector<std::size_t> order(simplex.size());
    while (evals < max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[order.size() - 2];
        if (std::isfinite(fv[worst]) &&
            std::abs(fv[worst] - fv[best]) <= ftol * (std::abs(fv[best]) + ftol)) {
            out.converged = true;
            break;
        }
        Vec centroid = Vec::Zero(n);
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i != worst) centroid += simplex[i];
        }
        centroid /= static_cast<double>(n);

        const Vec reflected = centroid + (centroid - simplex[worst]);
        const double fr = call(f, reflected, evals);
        if (fr < fv[best]) {
            const Vec expanded = centroid + 2.0 * (centroid - simplex[worst]);
            const double fe = call(f, expanded, evals);
            if (fe < fr) {
                simplex[worst] = expanded;
                fv[worst] = fe;
            } else {
                simplex[worst] = reflected;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = reflected;
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        const Vec contracted = outside ? Vec(centroid + 0.5 * (reflected - centroid))
                                       : Vec(centroid + 0.5 * (simplex[worst] - centroid));
        const double fc = call(f, contracted, evals);
        if (fc < std::min(fr, fv[worst])) {
            simplex[worst] = contracted;
            fv[worst] = fc;
            continue;
        }
        // Shrink towards the best vertex.
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i == best) continue;
            simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
            fv[i] = call(f, simplex[i], evals);
        }
    }
    const auto it = std::min_element(fv.begin(), fv.end());
    out.x = to_std(simplex[static_cast<std::size_t>(it - fv.begin())]);
    out.value = *it;
    out.evaluations = evals;
    return out;
}

Result bfgs(const Objective& f, std::vector<double> x0, int max_iter, double gtol) {
    const auto n = static_cast<Eigen::Index>(x0.size());
    Result out;
    int evals = 0;
    Vec x = to_vec(x0);
    double fx = call(f, x, evals);
    if (n == 0 || !std::isfinite(fx)) {
        out.x = std::move(x0);
        out.value = fx;
        out.evaluations = evals;
        out.converged = n == 0;
        return out;
    }

    const auto gradient = [&](const Vec& at, Vec& g) {
        g.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double h = 1e-6 * (1.0 + std::abs(at(i)));
            Vec lo = at;
            Vec hi = at;
            lo(i) -= h;
            hi(i) += h;
            const double fl = call(f, lo, evals);
            const double fh = call(f, hi, evals);
            if (!std::isfinite(fl) || !std::isfinite(fh)) return false;
            g(i) = (fh - fl) / (2.0 * h);
        }
        return true;
    };

    Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
    Vec g;
    if (!gradient(x, g)) {
        out.x = to_std(x);
        out.value = fx;
        out.evaluations = evals;
        return out;
    }
    for (int iter = 0; iter < max_iter; ++iter) {
        if (g.lpNorm<Eigen::Infinity>() < gtol) {
            out.converged = true;
            break;
        }
        Vec direction = -inv_hessian * g;
        if (direction.dot(g) >= 0.0) {
            inv_hessian.setIdentity();
            direction = -g;
        }
        double alpha = 1.0;
        Vec candidate;
        double fc = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            candidate = x + alpha * direction;
            fc = call(f, candidate, evals);
            if (fc <= fx + 1e-4 * alpha * direction.dot(g)) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            // No descent along the quasi-Newton direction: accept what we have.
            out.converged = g.lpNorm<Eigen::Infinity>() < 1e3 * gtol;
            break;
        }
        Vec g_new;
        if (!gradient(candidate, g_new)) {
            x = candidate;
            fx = fc;
            break;
        }
        const Vec s = candidate - x;
        const Vec y = g_new - g;
        const double sy = s.dot(y);
        const double improvement = fx - fc;
        x = candidate;
        fx = fc;
        g = g_new;
        if (sy > 1e-12) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
            inv_hessian = (ident - rho * s * y.transpose()) * inv_hessian *
                              (ident - rho * y * s.transpose()) +
                          rho * s * s.transpose();
        }
        if (improvement >= 0.0 && improvement < 1e-14 * (1.0 + std::abs(fx)) &&
            g.lpNorm<Eigen::Infinity>() < 1e3 * gtol) {
            out.converged = true;
            break;
        }
    }
    out.x = to_std(x);
    out.value = fx;
    out.evaluations = evals;
    return out;
}

}  // namespace carima::optim
