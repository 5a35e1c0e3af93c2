#include "carima/simulate.hpp"

#include "carima/error.hpp"
#include "carima/polynomial.hpp"
#include "carima/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace carima {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr EffectKind kKinds[] = {EffectKind::Point, EffectKind::Cumulative, EffectKind::TemporalAverage};

class ShockSource {
public:
    ShockSource(const ErrorModel& model, double sigma2, std::uint64_t seed)
        : model_(model), sigma_(std::sqrt(sigma2)), rng_(seed) {
        if (model.kind == ErrorDistribution::StudentT) {
            if (!(model.df > 2.0)) throw Error(ErrorCode::InvalidArgument, "Student-t errors need df > 2");
            t_ = std::student_t_distribution<double>(model.df);
            t_scale_ = sigma_ * std::sqrt((model.df - 2.0) / model.df);
        }
        if (model.kind == ErrorDistribution::Resample) {
            if (model.pool.size() < 2) throw Error(ErrorCode::TooFewResiduals, "resampling needs at least two errors");
            pool_ = model.pool;
            std::sort(pool_.begin(), pool_.end());
            const double m = stats::mean(pool_);
            for (double& v : pool_) v -= m;
            const double sd = std::sqrt(stats::variance(pool_));
            if (!(sd > 0.0)) throw Error(ErrorCode::InvalidArgument, "resampling pool is constant");
            for (double& v : pool_) v *= sigma_ / sd;
            pick_ = std::uniform_int_distribution<std::size_t>(0, pool_.size() - 1);
        }
    }

    double operator()() {
        switch (model_.kind) {
            case ErrorDistribution::Gaussian: return sigma_ * z_(rng_);
            case ErrorDistribution::StudentT: return t_scale_ * t_(rng_);
            case ErrorDistribution::Resample: return pool_[pick_(rng_)];
        }
        return 0.0;
    }

private:
    const ErrorModel& model_;
    double sigma_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> z_;
    std::student_t_distribution<double> t_;
    double t_scale_ = 1.0;
    std::vector<double> pool_;
    std::uniform_int_distribution<std::size_t> pick_;
};

double cell_truth(const SimulationConfig& c, EffectKind kind, int k) {
    if (!c.effect) return 0.0;
    const double d = *c.effect;
    if (c.effect_kind == InterventionKind::Persistent) return kind == EffectKind::Cumulative ? d * k : d;
    switch (kind) {
        case EffectKind::Point:
        case EffectKind::Contemporaneous: return k == 1 ? d : 0.0;
        case EffectKind::Cumulative: return d;
        case EffectKind::TemporalAverage: return d / k;
    }
    return 0.0;
}

RepRecord run_rep(const SimulationConfig& c, std::size_t r) {
    RepRecord rec;
    rec.rep = r;
    try {
        TimeSeries y = simulate_sarima(c.spec, c.truth, c.n, c.start, c.errors, derive_seed(c.seed, r, 0));
        if (c.effect) y = inject_effect(y, {c.effect_kind, c.intervention_date, *c.effect});
        const TimeSeries pre = y.between(c.start, c.intervention_date - 1);
        FitOptions fo;
        fo.seed = derive_seed(c.seed, r, 1);
        fo.compute_covariance = false;
        std::optional<FittedModel> model;
        if (c.use_selection) {
            model = select_order(pre, {}, c.grid, fo).best;
        } else if (c.use_true_params) {
            model = condition(c.spec, c.truth, pre);
        } else {
            model = fit(c.spec, pre, {}, fo);
        }
        const auto K = static_cast<std::size_t>(*std::max_element(c.horizons.begin(), c.horizons.end()));
        const ForecastResult fc = forecast(*model, K);
        const PsiWeights psi = level_psi_weights(*model, K);
        const std::vector<double> points = point_effects(y, fc, c.intervention_date, K);
        const BCoefficients b;
        rec.sigma2 = model->coef.sigma2;
        std::uint64_t stream = 2;
        for (int k : c.horizons) {
            const auto kk = static_cast<std::size_t>(k);
            const std::span<const double> head(points.data(), kk);
            for (EffectKind kind : kKinds) {
                EffectEstimate e;
                e.kind = kind;
                e.horizon = k;
                e.value = kind == EffectKind::Point        ? points[kk - 1]
                          : kind == EffectKind::Cumulative ? cumulative_effect(head)
                                                           : temporal_average_effect(head);
                const double var = null_variance(psi, b, rec.sigma2, kk, kind);
                e.std_error_normal = std::sqrt(var);
                e.p_value_normal = normal_test(e.value, var);
                if (c.n_boot > 0) {
                    const BootstrapResult br = bootstrap_test(*model, psi, b, kk, kind, e.value, c.n_boot,
                                                              derive_seed(c.seed, r, stream));
                    e.p_value_bootstrap = br.p_value;
                    e.bootstrap_critical = br.critical;
                } else {
                    e.p_value_bootstrap = kNaN;
                    e.bootstrap_critical = {kNaN, kNaN, kNaN, kNaN};
                }
                ++stream;
                e.multiplicative = multiplicative(e.value);
                rec.estimates.push_back(e);
            }
        }
        rec.ok = true;
    } catch (const Error& e) {
        rec.ok = false;
        rec.error = std::string(to_string(e.code())) + ": " + e.what();
    }
    return rec;
}

}  // namespace

const char* to_string(ErrorDistribution dist) noexcept {
    switch (dist) {
        case ErrorDistribution::Gaussian: return "gaussian";
        case ErrorDistribution::StudentT: return "student_t";
        case ErrorDistribution::Resample: return "resample";
    }
    return "?";
}

void SimulationConfig::validate() const {
    spec.validate();
    if (!spec.regressors.empty()) throw Error(ErrorCode::ConfigError, "simulation does not support regressors");
    const auto params = static_cast<std::size_t>(spec.coefficient_count() + 1);
    if (n <= 10 * params) {
        throw Error(ErrorCode::ConfigError, "n must exceed 10 x " + std::to_string(params) + " parameters");
    }
    if (horizons.empty()) throw Error(ErrorCode::ConfigError, "no horizons");
    for (int k : horizons) {
        if (k <= 0) throw Error(ErrorCode::ConfigError, "horizons must be positive");
    }
    if (n_reps <= 0) throw Error(ErrorCode::ConfigError, "n_reps must be positive");
    if (n_boot != 0 && n_boot < 500) throw Error(ErrorCode::ConfigError, "n_boot must be 0 or at least 500");
    if (use_selection && grid.empty()) throw Error(ErrorCode::ConfigError, "selection needs a grid");
    const Date end = start + static_cast<long>(n) - 1;
    const int K = *std::max_element(horizons.begin(), horizons.end());
    if (intervention_date <= start || end < intervention_date + (K - 1)) {
        throw Error(ErrorCode::ConfigError, "intervention date " + intervention_date.to_string() +
                                                " leaves no pre-period or no room for horizon " + std::to_string(K));
    }
}

TimeSeries simulate_sarima(const ModelSpec& spec, const Coefficients& truth, std::size_t n, Date start,
                           const ErrorModel& errors, std::uint64_t seed) {
    spec.validate();
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be positive");
    if (!(truth.sigma2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma2 must be positive");
    const auto s = static_cast<std::size_t>(std::max(spec.ord.s, 1));
    if (!poly::roots_outside_unit_circle(poly::multiply(poly::ar_polynomial(truth.phi), poly::ar_polynomial(truth.Phi, s)))) {
        throw Error(ErrorCode::NonStationaryParams, "simulation AR part is not stationary");
    }
    if (!poly::roots_outside_unit_circle(poly::multiply(poly::ma_polynomial(truth.theta), poly::ma_polynomial(truth.Theta, s)))) {
        throw Error(ErrorCode::NonStationaryParams, "simulation MA part is not invertible");
    }
    const ExpandedArma ex = expand_arma(spec, truth);
    const std::size_t burn =
        10 * static_cast<std::size_t>(spec.p + spec.q + static_cast<int>(s) * (spec.P + spec.Q) + 1);
    const std::size_t total = burn + n;
    ShockSource shock(errors, truth.sigma2, seed);
    std::vector<double> e(total), u(total, 0.0);
    for (double& v : e) v = shock();
    for (std::size_t t = 0; t < total; ++t) {
        double acc = e[t];
        for (std::size_t i = 0; i < ex.ar.size() && i < t; ++i) acc += ex.ar[i] * u[t - i - 1];
        for (std::size_t j = 0; j < ex.ma.size() && j < t; ++j) acc += ex.ma[j] * e[t - j - 1];
        u[t] = acc;
    }
    std::vector<double> w(u.begin() + static_cast<long>(burn), u.end());
    for (double& v : w) v += truth.constant;
    if (!spec.ord.none()) w = integrate_effect(w, spec.ord);
    return TimeSeries(start, std::move(w), "simulated");
}

TimeSeries simulate_sarima(const SimulationConfig& config) {
    return simulate_sarima(config.spec, config.truth, config.n, config.start, config.errors, config.seed);
}

TimeSeries inject_effect(const TimeSeries& ts, const InjectedEffect& effect) {
    const auto at = ts.index_of(effect.date);
    if (!at) {
        throw Error(ErrorCode::DateOutOfRange, "effect date " + effect.date.to_string() + " is outside " +
                                                   ts.start_date().to_string() + ".." + ts.end_date().to_string());
    }
    std::vector<double> v(ts.values().begin(), ts.values().end());
    const std::size_t last = effect.kind == InterventionKind::Pulse ? *at + 1 : v.size();
    for (std::size_t t = *at; t < last; ++t) v[t] += effect.magnitude;
    return TimeSeries(ts.start_date(), std::move(v), ts.name());
}

ExperimentResult run_experiment(const SimulationConfig& config) {
    config.validate();
    const auto reps = static_cast<std::size_t>(config.n_reps);
    ExperimentResult out;
    out.reps.resize(reps);

    unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, reps));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < reps; r = next++) out.reps[r] = run_rep(config, r);
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
        worker();
    }

    for (const RepRecord& r : out.reps) {
        if (!r.ok) ++out.failures;
    }
    if (out.failures * 100 >= reps) {
        const auto first = std::find_if(out.reps.begin(), out.reps.end(), [](const RepRecord& r) { return !r.ok; });
        throw Error(ErrorCode::ExperimentAborted, std::to_string(out.failures) + " of " + std::to_string(reps) +
                                                      " replications failed; first: " + first->error);
    }

    const double z = stats::normal_quantile(0.975);
    std::size_t cell = 0;
    for (int k : config.horizons) {
        for (EffectKind kind : kKinds) {
            CellSummary s;
            s.kind = kind;
            s.horizon = k;
            s.truth = cell_truth(config, kind, k);
            std::vector<double> dev;
            double sum = 0.0, sq = 0.0, var_sum = 0.0, rej_n = 0.0, rej_b = 0.0;
            for (const RepRecord& r : out.reps) {
                if (!r.ok) continue;
                const EffectEstimate& e = r.estimates[cell];
                const double d = e.value - s.truth;
                dev.push_back(d);
                sum += e.value;
                sq += d * d;
                var_sum += e.std_error_normal * e.std_error_normal;
                if (e.p_value_normal < 0.05) rej_n += 1.0;
                if (e.p_value_bootstrap < 0.05) rej_b += 1.0;
            }
            s.count = dev.size();
            const auto cnt = static_cast<double>(s.count);
            s.mean = sum / cnt;
            s.bias = s.mean - s.truth;
            s.rmse = std::sqrt(sq / cnt);
            double centred = 0.0;
            for (double d : dev) centred += (d - s.bias) * (d - s.bias);
            s.empirical_variance = centred / (cnt - 1.0);
            s.formula_variance = var_sum / cnt;
            s.rejection_normal = rej_n / cnt;
            s.rejection_bootstrap = config.n_boot > 0 ? rej_b / cnt : kNaN;
            std::sort(dev.begin(), dev.end());
            s.empirical_q025 = stats::quantile_sorted(dev, 0.025);
            s.empirical_q975 = stats::quantile_sorted(dev, 0.975);
            s.normal_q025 = -z * std::sqrt(s.formula_variance);
            s.normal_q975 = z * std::sqrt(s.formula_variance);
            out.cells.push_back(s);
            ++cell;
        }
    }
    return out;
}

}  // namespace carima
