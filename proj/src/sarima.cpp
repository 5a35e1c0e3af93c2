#include "carima/sarima.hpp"

#include "carima/error.hpp"
#include "carima/parameter_transform.hpp"
#include "carima/polynomial.hpp"
#include "carima/stats.hpp"
#include "kalman.hpp"
#include "optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

namespace carima {

std::string ModelSpec::label() const {
    std::ostringstream out;
    out << "ARIMA(" << p << ',' << ord.d << ',' << q << ')';
    if (P > 0 || Q > 0 || ord.D > 0) {
        out << '(' << P << ',' << ord.D << ',' << Q << ")[" << ord.s << ']';
    }
    return out.str();
}

void ModelSpec::validate() const {
    if (p < 0 || q < 0 || P < 0 || Q < 0) {
        throw Error(ErrorCode::InvalidArgument, "model orders must be nonnegative");
    }
    ord.validate();
    if ((P > 0 || Q > 0 || ord.D > 0) && ord.s < 2) {
        throw Error(ErrorCode::InvalidArgument, "seasonal terms need a period s >= 2");
    }
}

void ModelSpec::check_estimable(std::size_t n) const {
    const long effective = static_cast<long>(n) - ord.lost();
    const long params = arma_count() + static_cast<long>(regressors.size());
    if (effective <= 0 || 3 * params >= effective) {
        throw Error(ErrorCode::EstimabilityViolation,
                    label() + " with " + std::to_string(regressors.size()) +
                        " regressors is not estimable from " + std::to_string(effective) +
                        " differenced observations");
    }
}

ExpandedArma expand_arma(const ModelSpec& spec, const Coefficients& coef) {
    const auto s = static_cast<std::size_t>(std::max(spec.ord.s, 1));
    const poly::Coeffs ar = poly::multiply(poly::ar_polynomial(coef.phi),
                                           poly::ar_polynomial(coef.Phi, s));
    const poly::Coeffs ma = poly::multiply(poly::ma_polynomial(coef.theta),
                                           poly::ma_polynomial(coef.Theta, s));
    ExpandedArma out;
    for (std::size_t i = 1; i < ar.size(); ++i) out.ar.push_back(-ar[i]);
    for (std::size_t i = 1; i < ma.size(); ++i) out.ma.push_back(ma[i]);
    while (!out.ar.empty() && out.ar.back() == 0.0) out.ar.pop_back();
    while (!out.ma.empty() && out.ma.back() == 0.0) out.ma.pop_back();
    return out;
}

std::vector<std::string> FittedModel::parameter_names() const {
    std::vector<std::string> names;
    for (int i = 1; i <= spec.p; ++i) names.push_back("phi" + std::to_string(i));
    for (int i = 1; i <= spec.q; ++i) names.push_back("theta" + std::to_string(i));
    for (int i = 1; i <= spec.P; ++i) names.push_back("Phi" + std::to_string(i));
    for (int i = 1; i <= spec.Q; ++i) names.push_back("Theta" + std::to_string(i));
    if (spec.include_constant) names.emplace_back("const");
    for (const auto& r : spec.regressors) names.push_back(r);
    return names;
}

std::vector<double> FittedModel::parameter_values() const {
    std::vector<double> v;
    v.insert(v.end(), coef.phi.begin(), coef.phi.end());
    v.insert(v.end(), coef.theta.begin(), coef.theta.end());
    v.insert(v.end(), coef.Phi.begin(), coef.Phi.end());
    v.insert(v.end(), coef.Theta.begin(), coef.Theta.end());
    if (spec.include_constant) v.push_back(coef.constant);
    v.insert(v.end(), coef.beta.begin(), coef.beta.end());
    return v;
}

std::vector<double> FittedModel::std_errors() const {
    const std::size_t k = parameter_names().size();
    std::vector<double> out(k, std::numeric_limits<double>::quiet_NaN());
    if (param_cov.rows() == static_cast<Eigen::Index>(k)) {
        for (std::size_t i = 0; i < k; ++i) {
            const double v = param_cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
            out[i] = v >= 0.0 ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

/// Differenced outcome and mean-equation design shared by every evaluation.
struct Problem {
    ModelSpec spec;
    TimeSeries y;
    std::vector<double> w;
    Eigen::MatrixXd design;      // n_eff x (const + regressors), differenced regressors
    Eigen::MatrixXd raw_regressors;
    Eigen::MatrixXd stacked;     // [w, design]

    [[nodiscard]] Eigen::Index n() const { return static_cast<Eigen::Index>(w.size()); }
    [[nodiscard]] Eigen::Index mean_terms() const { return design.cols(); }
};

Problem prepare(const ModelSpec& spec, const TimeSeries& y, const CovariateMatrix& X) {
    spec.validate();
    Problem pr{spec, y, {}, {}, {}, {}};
    pr.w = difference(y.values(), spec.ord);
    const auto n = static_cast<Eigen::Index>(pr.w.size());
    const auto k = static_cast<Eigen::Index>(spec.regressors.size());
    pr.raw_regressors = X.extract(spec.regressors, y.start_date(), y.size());
    const Eigen::Index terms = k + (spec.include_constant ? 1 : 0);
    pr.design.resize(n, terms);
    Eigen::Index col = 0;
    if (spec.include_constant) {
        pr.design.col(col++).setOnes();
    }
    for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::VectorXd raw = pr.raw_regressors.col(j);
        const auto diffed = difference(std::span<const double>(raw.data(), static_cast<std::size_t>(raw.size())), spec.ord);
        pr.design.col(col++) = Eigen::Map<const Eigen::VectorXd>(diffed.data(), n);
    }
    pr.stacked.resize(n, 1 + terms);
    pr.stacked.col(0) = Eigen::Map<const Eigen::VectorXd>(pr.w.data(), n);
    pr.stacked.rightCols(terms) = pr.design;
    return pr;
}

bool invertible(const ExpandedArma& arma) {
    return poly::roots_outside_unit_circle(poly::ma_polynomial(arma.ma));
}

/// Layout of the unconstrained optimisation vector: one tanh-PACF block per
/// polynomial.
Coefficients unpack_arma(const ModelSpec& spec, std::span<const double> u) {
    Coefficients c;
    std::size_t at = 0;
    const auto take = [&](int count) {
        auto block = u.subspan(at, static_cast<std::size_t>(count));
        at += static_cast<std::size_t>(count);
        return block;
    };
    c.phi = transform::unconstrained_to_ar(take(spec.p));
    c.theta = transform::unconstrained_to_ma(take(spec.q));
    c.Phi = transform::unconstrained_to_ar(take(spec.P));
    c.Theta = transform::unconstrained_to_ma(take(spec.Q));
    return c;
}

std::vector<double> pack_arma(const Coefficients& c) {
    std::vector<double> u;
    for (const auto& block : {transform::ar_to_unconstrained(c.phi), transform::ma_to_unconstrained(c.theta),
                              transform::ar_to_unconstrained(c.Phi), transform::ma_to_unconstrained(c.Theta)}) {
        u.insert(u.end(), block.begin(), block.end());
    }
    return u;
}

struct ProfileEval {
    double loglik = -std::numeric_limits<double>::infinity();
    double sigma2 = 0.0;
    Eigen::VectorXd gamma;       // [const?, beta...]
    Eigen::VectorXd residuals;   // standardized innovations of u
    Eigen::VectorXd next_state;
};

/// sigma^2 concentrated and (const, beta) profiled by GLS on the filtered data.
ProfileEval profile(const Problem& pr, const Coefficients& arma) {
    const ExpandedArma ex = expand_arma(pr.spec, arma);
    const kalman::ArmaSystem sys = kalman::make_system(ex.ar, ex.ma);
    kalman::FilterResult fr = kalman::filter(sys, pr.stacked);

    ProfileEval out;
    const Eigen::Index terms = pr.mean_terms();
    const Eigen::VectorXd vw = fr.std_innovations.col(0);
    if (terms > 0) {
        const Eigen::MatrixXd vz = fr.std_innovations.rightCols(terms);
        out.gamma = vz.colPivHouseholderQr().solve(vw);
        out.residuals = vw - vz * out.gamma;
        out.next_state = fr.next_state.col(0) - fr.next_state.rightCols(terms) * out.gamma;
    } else {
        out.gamma.resize(0);
        out.residuals = vw;
        out.next_state = fr.next_state.col(0);
    }
    const auto n = static_cast<double>(pr.n());
    const double ssq = out.residuals.squaredNorm();
    out.sigma2 = ssq / n;
    if (!(out.sigma2 > 0.0)) {
        out.sigma2 = std::numeric_limits<double>::min();
    }
    out.loglik = -0.5 * n * (kLog2Pi + std::log(out.sigma2) + 1.0) - 0.5 * fr.sum_log_f;
    return out;
}

struct DirectEval {
    double sum_log_f = 0.0;
    Eigen::VectorXd residuals;
    Eigen::VectorXd next_state;
};

/// Filters u = w - design * gamma at fixed coefficients.
DirectEval direct(const Problem& pr, const Coefficients& c) {
    const ExpandedArma ex = expand_arma(pr.spec, c);
    if (!invertible(ex)) {
        throw Error(ErrorCode::NonStationaryParams, "MA polynomial is not invertible");
    }
    const kalman::ArmaSystem sys = kalman::make_system(ex.ar, ex.ma);
    Eigen::VectorXd gamma(pr.mean_terms());
    Eigen::Index at = 0;
    if (pr.spec.include_constant) gamma(at++) = c.constant;
    if (c.beta.size() != pr.spec.regressors.size()) {
        throw Error(ErrorCode::InvalidArgument, "beta length does not match the regressor list");
    }
    for (double b : c.beta) gamma(at++) = b;
    Eigen::MatrixXd u = pr.stacked.col(0);
    if (pr.mean_terms() > 0) u -= pr.design * gamma;
    kalman::FilterResult fr = kalman::filter(sys, u);
    return {fr.sum_log_f, fr.std_innovations.col(0), fr.next_state.col(0)};
}

double profiled_sigma_loglik(const Problem& pr, const DirectEval& ev) {
    const auto n = static_cast<double>(pr.n());
    const double sigma2 = ev.residuals.squaredNorm() / n;
    return -0.5 * n * (kLog2Pi + std::log(sigma2) + 1.0) - 0.5 * ev.sum_log_f;
}

Coefficients from_natural(const ModelSpec& spec, std::span<const double> theta) {
    Coefficients c;
    std::size_t at = 0;
    const auto take = [&](int count) {
        std::vector<double> v(theta.begin() + static_cast<long>(at),
                              theta.begin() + static_cast<long>(at) + count);
        at += static_cast<std::size_t>(count);
        return v;
    };
    c.phi = take(spec.p);
    c.theta = take(spec.q);
    c.Phi = take(spec.P);
    c.Theta = take(spec.Q);
    if (spec.include_constant) c.constant = theta[at++];
    c.beta = take(static_cast<int>(spec.regressors.size()));
    return c;
}

// Hannan-Rissanen: a long autoregression supplies innovation estimates, then
// one least-squares regression on lagged values and lagged innovations.
Coefficients hannan_rissanen(const Problem& pr) {
    const ModelSpec& spec = pr.spec;
    Coefficients zero;
    zero.phi.assign(static_cast<std::size_t>(spec.p), 0.0);
    zero.theta.assign(static_cast<std::size_t>(spec.q), 0.0);
    zero.Phi.assign(static_cast<std::size_t>(spec.P), 0.0);
    zero.Theta.assign(static_cast<std::size_t>(spec.Q), 0.0);
    if (spec.arma_count() == 0) return zero;

    Eigen::VectorXd u = pr.stacked.col(0);
    if (pr.mean_terms() > 0) {
        const Eigen::VectorXd g = pr.design.colPivHouseholderQr().solve(u);
        u -= pr.design * g;
    }
    const auto n = static_cast<std::size_t>(u.size());
    const int s = std::max(spec.ord.s, 1);
    const int max_ar_lag = spec.p + s * spec.P;
    const int max_ma_lag = spec.q + s * spec.Q;

    std::vector<double> eps(n, 0.0);
    int long_order = 0;
    if (max_ma_lag > 0) {
        long_order = std::min<int>(std::max(max_ar_lag, max_ma_lag) + 10, static_cast<int>(n / 4));
        if (long_order < 1) return zero;
        std::vector<double> uv(u.data(), u.data() + u.size());
        std::vector<double> r(static_cast<std::size_t>(long_order) + 1, 0.0);
        {
            const double m = 0.0;
            double c0 = 0.0;
            for (double v : uv) c0 += (v - m) * (v - m);
            if (c0 <= 0.0) return zero;
            for (int k = 0; k <= long_order; ++k) {
                double ck = 0.0;
                for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) ck += uv[t] * uv[t - static_cast<std::size_t>(k)];
                r[static_cast<std::size_t>(k)] = ck / c0;
            }
        }
        // Durbin-Levinson for the long AR.
        std::vector<double> a(static_cast<std::size_t>(long_order) + 1, 0.0);
        std::vector<double> prev = a;
        double v = 1.0;
        for (int k = 1; k <= long_order; ++k) {
            double num = r[static_cast<std::size_t>(k)];
            for (int j = 1; j < k; ++j) num -= prev[static_cast<std::size_t>(j)] * r[static_cast<std::size_t>(k - j)];
            const double kappa = num / v;
            a[static_cast<std::size_t>(k)] = kappa;
            for (int j = 1; j < k; ++j) a[static_cast<std::size_t>(j)] = prev[static_cast<std::size_t>(j)] - kappa * prev[static_cast<std::size_t>(k - j)];
            v *= 1.0 - kappa * kappa;
            prev = a;
        }
        for (std::size_t t = static_cast<std::size_t>(long_order); t < n; ++t) {
            double e = uv[t];
            for (int j = 1; j <= long_order; ++j) e -= a[static_cast<std::size_t>(j)] * uv[t - static_cast<std::size_t>(j)];
            eps[t] = e;
        }
    }

    const int start = long_order + std::max(max_ar_lag, max_ma_lag);
    const int rows = static_cast<int>(n) - start;
    const int cols = spec.arma_count();
    if (rows <= 2 * cols) return zero;
    Eigen::MatrixXd A(rows, cols);
    Eigen::VectorXd b(rows);
    for (int i = 0; i < rows; ++i) {
        const auto t = static_cast<std::size_t>(start + i);
        int c = 0;
        for (int j = 1; j <= spec.p; ++j) A(i, c++) = u(static_cast<Eigen::Index>(t) - j);
        for (int j = 1; j <= spec.q; ++j) A(i, c++) = eps[t - static_cast<std::size_t>(j)];
        for (int j = 1; j <= spec.P; ++j) A(i, c++) = u(static_cast<Eigen::Index>(t) - j * s);
        for (int j = 1; j <= spec.Q; ++j) A(i, c++) = eps[t - static_cast<std::size_t>(j * s)];
        b(i) = u(static_cast<Eigen::Index>(t));
    }
    const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
    if (!sol.allFinite()) return zero;

    Coefficients c = zero;
    int at = 0;
    for (auto& x : c.phi) x = sol(at++);
    for (auto& x : c.theta) x = sol(at++);
    for (auto& x : c.Phi) x = sol(at++);
    for (auto& x : c.Theta) x = sol(at++);

    const auto admissible_ar = [](std::vector<double>& coef) {
        for (int i = 0; i < 60 && !poly::roots_outside_unit_circle(poly::ar_polynomial(coef), 0.02); ++i) {
            for (double& x : coef) x *= 0.9;
        }
        if (!poly::roots_outside_unit_circle(poly::ar_polynomial(coef), 0.02)) {
            std::fill(coef.begin(), coef.end(), 0.0);
        }
    };
    const auto admissible_ma = [](std::vector<double>& coef) {
        for (int i = 0; i < 60 && !poly::roots_outside_unit_circle(poly::ma_polynomial(coef), 0.02); ++i) {
            for (double& x : coef) x *= 0.9;
        }
        if (!poly::roots_outside_unit_circle(poly::ma_polynomial(coef), 0.02)) {
            std::fill(coef.begin(), coef.end(), 0.0);
        }
    };
    admissible_ar(c.phi);
    admissible_ar(c.Phi);
    admissible_ma(c.theta);
    admissible_ma(c.Theta);
    return c;
}

Eigen::MatrixXd observed_information_inverse(const Problem& pr, std::span<const double> at) {
    const auto k = static_cast<Eigen::Index>(at.size());
    std::vector<double> x(at.begin(), at.end());
    const auto eval = [&](const std::vector<double>& point) {
        try {
            return profiled_sigma_loglik(pr, direct(pr, from_natural(pr.spec, point)));
        } catch (const Error&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    std::vector<double> h(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) h[static_cast<std::size_t>(i)] = 1e-5 * (1.0 + std::abs(x[static_cast<std::size_t>(i)]));

    const double f0 = eval(x);
    Eigen::MatrixXd hess(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        std::vector<double> xp = x;
        std::vector<double> xm = x;
        xp[ui] += h[ui];
        xm[ui] -= h[ui];
        hess(i, i) = (eval(xp) - 2.0 * f0 + eval(xm)) / (h[ui] * h[ui]);
        for (Eigen::Index j = 0; j < i; ++j) {
            const auto uj = static_cast<std::size_t>(j);
            std::vector<double> pp = x, pm = x, mp = x, mm = x;
            pp[ui] += h[ui]; pp[uj] += h[uj];
            pm[ui] += h[ui]; pm[uj] -= h[uj];
            mp[ui] -= h[ui]; mp[uj] += h[uj];
            mm[ui] -= h[ui]; mm[uj] -= h[uj];
            const double v = (eval(pp) - eval(pm) - eval(mp) + eval(mm)) / (4.0 * h[ui] * h[uj]);
            hess(i, j) = v;
            hess(j, i) = v;
        }
    }
    if (!hess.allFinite()) {
        throw Error(ErrorCode::SingularInformation,
                    "observed information could not be evaluated around the estimate");
    }
    const Eigen::MatrixXd info = -hess;
    const Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::SingularInformation, "observed information matrix is not positive definite");
    }
    Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(k, k));
    return 0.5 * (cov + cov.transpose());
}

FittedModel assemble(const Problem& pr, const Coefficients& coef, const Eigen::VectorXd& residuals,
                     const Eigen::VectorXd& next_state, double loglik) {
    const auto lost = static_cast<std::size_t>(pr.spec.ord.lost());
    const std::size_t n_eff = pr.w.size();
    std::vector<double> resid(residuals.data(), residuals.data() + residuals.size());
    FittedModel m{
        .spec = pr.spec,
        .coef = coef,
        .residuals = TimeSeries(pr.y.date_at(lost), std::move(resid), pr.y.name() + "_residuals"),
        .loglik = 0.0,
        .bic = 0.0,
        .param_cov = {},
        .n_obs = 0,
        .converged = true,
        .evaluations = 0,
        .last_date = pr.y.end_date(),
        .last_levels = {},
        .last_regressor_rows = {},
        .next_state = {},
    };
    m.loglik = loglik;
    const int k = pr.spec.coefficient_count() + 1;
    m.bic = -2.0 * loglik + k * std::log(static_cast<double>(n_eff));
    m.n_obs = pr.y.size();
    m.last_date = pr.y.end_date();
    const auto vals = pr.y.values();
    m.last_levels.assign(vals.end() - static_cast<long>(lost), vals.end());
    m.last_regressor_rows = pr.raw_regressors.bottomRows(static_cast<Eigen::Index>(lost));
    m.next_state = next_state;
    return m;
}

Coefficients with_mean(Coefficients arma, const ModelSpec& spec, const Eigen::VectorXd& gamma,
                       double sigma2) {
    Eigen::Index at = 0;
    arma.constant = spec.include_constant ? gamma(at++) : 0.0;
    arma.beta.clear();
    for (std::size_t j = 0; j < spec.regressors.size(); ++j) arma.beta.push_back(gamma(at++));
    arma.sigma2 = sigma2;
    return arma;
}

}  // namespace

FittedModel fit(const ModelSpec& spec, const TimeSeries& y, const CovariateMatrix& X,
                const FitOptions& options) {
    spec.validate();
    spec.check_estimable(y.size());
    const Problem pr = prepare(spec, y, X);
    const auto n = static_cast<double>(pr.n());

    const optim::Objective objective = [&](std::span<const double> u) {
        for (double v : u) {
            if (!std::isfinite(v) || std::abs(v) > 25.0) return std::numeric_limits<double>::infinity();
        }
        try {
            return -profile(pr, unpack_arma(spec, u)).loglik / n;
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const Coefficients start = hannan_rissanen(pr);
    const std::vector<double> u0 = pack_arma(start);
    const int dim = spec.arma_count();

    optim::Result best;
    best.value = std::numeric_limits<double>::infinity();
    int evaluations = 0;
    std::mt19937_64 jitter_rng(options.seed);
    std::normal_distribution<double> jitter(0.0, 0.5);
    const int starts = dim == 0 ? 1 : 1 + std::max(0, options.restarts);
    for (int attempt = 0; attempt < starts; ++attempt) {
        std::vector<double> x0 = u0;
        if (attempt > 0) {
            for (double& v : x0) v += jitter(jitter_rng);
        }
        optim::Result simplex = optim::nelder_mead(objective, x0, 0.2, 200 * (dim + 1), 1e-10);
        optim::Result polished = optim::bfgs(objective, simplex.x, 200, 1e-7);
        evaluations += simplex.evaluations + polished.evaluations;
        if (!std::isfinite(polished.value) || simplex.value < polished.value) {
            polished.x = simplex.x;
            polished.value = simplex.value;
            polished.converged = simplex.converged;
        }
        if (polished.value < best.value) {
            best = polished;
        }
        if (evaluations > options.max_evaluations * starts) break;
    }
    if (!std::isfinite(best.value)) {
        throw Error(ErrorCode::NonConvergence,
                    spec.label() + ": likelihood optimisation failed from every start");
    }

    const Coefficients arma = unpack_arma(spec, best.x);
    const ProfileEval pe = profile(pr, arma);
    Coefficients coef = with_mean(arma, spec, pe.gamma, pe.sigma2);

    FittedModel model = assemble(pr, coef, pe.residuals, pe.next_state, pe.loglik);
    model.converged = best.converged || dim == 0;
    model.evaluations = evaluations;
    if (options.compute_covariance) {
        model.param_cov = observed_information_inverse(pr, model.parameter_values());
    }
    return model;
}

FittedModel condition(const ModelSpec& spec, const Coefficients& coef, const TimeSeries& y,
                      const CovariateMatrix& X) {
    const Problem pr = prepare(spec, y, X);
    const DirectEval ev = direct(pr, coef);
    const auto n = static_cast<double>(pr.n());
    const double loglik = -0.5 * n * (kLog2Pi + std::log(coef.sigma2)) - 0.5 * ev.sum_log_f -
                          0.5 * ev.residuals.squaredNorm() / coef.sigma2;
    return assemble(pr, coef, ev.residuals, ev.next_state, loglik);
}

double loglikelihood(const ModelSpec& spec, const Coefficients& coef, const TimeSeries& y,
                     const CovariateMatrix& X) {
    if (!(coef.sigma2 > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "sigma2 must be positive");
    }
    return condition(spec, coef, y, X).loglik;
}

PsiWeights psi_weights(const ModelSpec& spec, const Coefficients& coef, std::size_t k) {
    const ExpandedArma ex = expand_arma(spec, coef);
    return {poly::divide_series(poly::ma_polynomial(ex.ma), poly::ar_polynomial(ex.ar), k)};
}

PsiWeights psi_weights(const FittedModel& model, std::size_t k) {
    return psi_weights(model.spec, model.coef, k);
}

PsiWeights level_psi_weights(const FittedModel& model, std::size_t k) {
    PsiWeights psi = psi_weights(model, k);
    if (!model.spec.ord.none()) {
        psi.weights = integrate_effect(psi.weights, model.spec.ord);
    }
    return psi;
}

ForecastResult forecast(const FittedModel& model, std::size_t k, const CovariateMatrix& X_future,
                        std::span<const double> prior_effects) {
    if (k == 0) {
        throw Error(ErrorCode::InvalidArgument, "forecast horizon must be positive");
    }
    if (!prior_effects.empty() && prior_effects.size() != k) {
        throw Error(ErrorCode::InvalidArgument, "prior effects must cover the forecast horizon");
    }
    const ModelSpec& spec = model.spec;
    const auto kk = static_cast<Eigen::Index>(k);
    const auto lost = static_cast<Eigen::Index>(spec.ord.lost());
    const Date first = model.last_date + 1;

    // Differenced regressors over the horizon, using the stored raw history.
    const Eigen::MatrixXd future_raw = X_future.extract(spec.regressors, first, k);
    Eigen::VectorXd mean = Eigen::VectorXd::Constant(kk, spec.include_constant ? model.coef.constant : 0.0);
    for (std::size_t j = 0; j < spec.regressors.size(); ++j) {
        std::vector<double> raw;
        const auto col = static_cast<Eigen::Index>(j);
        for (Eigen::Index i = 0; i < lost; ++i) raw.push_back(model.last_regressor_rows(i, col));
        for (Eigen::Index i = 0; i < kk; ++i) raw.push_back(future_raw(i, col));
        const auto diffed = difference(raw, spec.ord);
        for (Eigen::Index i = 0; i < kk; ++i) mean(i) += model.coef.beta[j] * diffed[static_cast<std::size_t>(i)];
    }

    const ExpandedArma ex = expand_arma(spec, model.coef);
    Eigen::VectorXd state = model.next_state;
    const auto r = state.size();
    std::vector<double> differenced(k);
    for (Eigen::Index h = 0; h < kk; ++h) {
        differenced[static_cast<std::size_t>(h)] = mean(h) + state(0);
        const double head = state(0);
        for (Eigen::Index i = 0; i < r; ++i) {
            double acc = i < static_cast<Eigen::Index>(ex.ar.size()) ? ex.ar[static_cast<std::size_t>(i)] * head : 0.0;
            if (i + 1 < r) acc += state(i + 1);
            state(i) = acc;
        }
    }
    std::vector<double> point = integrate(differenced, model.last_levels, spec.ord);
    for (std::size_t h = 0; h < prior_effects.size(); ++h) point[h] += prior_effects[h];

    const PsiWeights psi = level_psi_weights(model, k);
    std::vector<double> variance(k);
    double acc = 0.0;
    for (std::size_t h = 0; h < k; ++h) {
        acc += psi[h] * psi[h];
        variance[h] = model.coef.sigma2 * acc;
    }
    return {TimeSeries(first, std::move(point), "forecast"),
            std::move(variance), k};
}

OrderSelection select_order(const TimeSeries& y, const CovariateMatrix& X,
                            std::span<const ModelSpec> grid, const FitOptions& options) {
    if (grid.empty()) {
        throw Error(ErrorCode::InvalidArgument, "order selection grid is empty");
    }
    std::optional<FittedModel> best;
    std::vector<CandidateRecord> records;
    const auto better = [](const FittedModel& a, const FittedModel& b) {
        if (a.bic != b.bic) return a.bic < b.bic;
        if (a.spec.coefficient_count() != b.spec.coefficient_count()) {
            return a.spec.coefficient_count() < b.spec.coefficient_count();
        }
        return a.spec.order_vector() < b.spec.order_vector();
    };
    for (const ModelSpec& spec : grid) {
        CandidateRecord rec{spec, false, 0.0, {}};
        try {
            FittedModel m = fit(spec, y, X, options);
            rec.ok = true;
            rec.bic = m.bic;
            if (!best || better(m, *best)) best = std::move(m);
        } catch (const Error& e) {
            rec.message = std::string(to_string(e.code())) + ": " + e.what();
        }
        records.push_back(std::move(rec));
    }
    if (!best) {
        throw Error(ErrorCode::AllSpecsFailed, "no candidate model could be fitted");
    }
    return {std::move(*best), std::move(records)};
}

std::vector<ModelSpec> order_grid(const ModelSpec& base, int p_max, int q_max, int P_max, int Q_max) {
    std::vector<ModelSpec> out;
    for (int p = 0; p <= p_max; ++p)
        for (int q = 0; q <= q_max; ++q)
            for (int P = 0; P <= P_max; ++P)
                for (int Q = 0; Q <= Q_max; ++Q) {
                    ModelSpec s = base;
                    s.p = p;
                    s.q = q;
                    s.P = P;
                    s.Q = Q;
                    out.push_back(std::move(s));
                }
    return out;
}

}  // namespace carima
