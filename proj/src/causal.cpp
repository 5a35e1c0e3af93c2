#include "carima/causal.hpp"

#include "carima/error.hpp"
#include "carima/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace carima {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::span<const int> horizons_for(std::span<const std::vector<int>> horizons, std::size_t i) {
    if (horizons.empty()) return {};
    if (horizons.size() == 1) return horizons[0];
    return horizons[i];
}

std::uint64_t splitmix(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

CriticalValues nan_critical() { return {kNaN, kNaN, kNaN, kNaN}; }

}  // namespace

const char* to_string(InterventionKind kind) noexcept {
    return kind == InterventionKind::Pulse ? "pulse" : "persistent";
}

InterventionKind parse_intervention_kind(const std::string& text) {
    if (text == "pulse") return InterventionKind::Pulse;
    if (text == "persistent") return InterventionKind::Persistent;
    throw Error(ErrorCode::InvalidArgument, "intervention kind must be 'pulse' or 'persistent', got '" + text + "'");
}

const char* to_string(EffectKind kind) noexcept {
    switch (kind) {
        case EffectKind::Point: return "point";
        case EffectKind::Cumulative: return "cumulative";
        case EffectKind::TemporalAverage: return "temporal_average";
        case EffectKind::Contemporaneous: return "contemporaneous";
    }
    return "?";
}

InterventionSchedule::InterventionSchedule(std::vector<Intervention> interventions)
    : items_(std::move(interventions)) {
    for (std::size_t i = 1; i < items_.size(); ++i) {
        if (!(items_[i - 1].date < items_[i].date)) {
            throw Error(ErrorCode::InvalidSchedule, "intervention dates must be strictly increasing: " +
                                                        items_[i - 1].date.to_string() + " then " +
                                                        items_[i].date.to_string());
        }
    }
}

void InterventionSchedule::validate(const TimeSeries& y, std::span<const std::vector<int>> horizons,
                                    std::size_t min_pre) const {
    if (horizons.size() > 1 && horizons.size() != items_.size()) {
        throw Error(ErrorCode::InvalidSchedule, "need one horizon list per intervention");
    }
    for (std::size_t i = 0; i < items_.size(); ++i) {
        const Intervention& iv = items_[i];
        const auto at = y.index_of(iv.date);
        if (!at) {
            throw Error(ErrorCode::InvalidSchedule,
                        "intervention '" + iv.label + "' on " + iv.date.to_string() + " is outside the series");
        }
        if (*at < min_pre) {
            throw Error(ErrorCode::InvalidSchedule, "intervention '" + iv.label + "' has " + std::to_string(*at) +
                                                        " pre-intervention observations, need " +
                                                        std::to_string(min_pre));
        }
        const auto ks = horizons_for(horizons, i);
        for (int k : ks) {
            if (k <= 0) throw Error(ErrorCode::InvalidSchedule, "horizons must be positive");
        }
        if (iv.kind != InterventionKind::Persistent || i + 1 >= items_.size() || ks.empty()) continue;
        const int k = *std::max_element(ks.begin(), ks.end());
        const Date last = iv.date + (k - 1);
        if (!(last < items_[i + 1].date)) {
            throw Error(ErrorCode::InvalidSchedule, "horizon " + std::to_string(k) + " of '" + iv.label + "' reaches " +
                                                        last.to_string() + ", not before the next intervention on " +
                                                        items_[i + 1].date.to_string());
        }
    }
}

void BCoefficients::validate() const {
    if (b.empty() || b[0] != 1.0) throw Error(ErrorCode::InvalidArgument, "b coefficients must start with b0 = 1");
}

std::vector<double> point_effects(const TimeSeries& observed, const ForecastResult& counterfactual, Date t_n,
                                  std::size_t k) {
    const auto at = observed.index_of(t_n);
    if (!at || *at + k > observed.size()) {
        throw Error(ErrorCode::HorizonExceedsData, "observed series does not cover " + std::to_string(k) +
                                                       " days from " + t_n.to_string());
    }
    if (counterfactual.horizon < k || counterfactual.point.start_date() != t_n) {
        throw Error(ErrorCode::HorizonExceedsData, "counterfactual forecast does not cover " + std::to_string(k) +
                                                       " days from " + t_n.to_string());
    }
    std::vector<double> out(k);
    for (std::size_t h = 0; h < k; ++h) out[h] = observed[*at + h] - counterfactual.point[h];
    return out;
}

double cumulative_effect(std::span<const double> points) {
    if (points.empty()) throw Error(ErrorCode::InvalidArgument, "no point effects");
    double s = 0.0;
    for (double v : points) s += v;
    return s;
}

double temporal_average_effect(std::span<const double> points) {
    return cumulative_effect(points) / static_cast<double>(points.size());
}

std::vector<double> effect_weights(const PsiWeights& psi, const BCoefficients& b, std::size_t k, EffectKind kind) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
    if (psi.weights.size() < k) {
        throw Error(ErrorCode::InsufficientPsiWeights, "need " + std::to_string(k) + " psi weights, have " +
                                                           std::to_string(psi.weights.size()));
    }
    b.validate();
    std::vector<double> w(k, 0.0);
    if (kind == EffectKind::Point || kind == EffectKind::Contemporaneous) {
        for (std::size_t j = 1; j <= k; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i <= k - j; ++i) acc += b[i] * psi[k - j - i];
            w[j - 1] = acc;
        }
        return w;
    }
    for (std::size_t h = 1; h <= k; ++h) {
        double acc = 0.0;
        for (std::size_t i = 0; i <= k - h; ++i) {
            double inner = 0.0;
            for (std::size_t j = i; j <= k - h; ++j) inner += psi[k - h - j];
            acc += b[i] * inner;
        }
        w[h - 1] = kind == EffectKind::TemporalAverage ? acc / static_cast<double>(k) : acc;
    }
    return w;
}

double null_variance(const PsiWeights& psi, const BCoefficients& b, double sigma2, std::size_t k, EffectKind kind) {
    if (!(sigma2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma2 must be positive");
    if (kind == EffectKind::TemporalAverage) {
        const double kk = static_cast<double>(k);
        return null_variance(psi, b, sigma2, k, EffectKind::Cumulative) / (kk * kk);
    }
    double s = 0.0;
    for (double w : effect_weights(psi, b, k, kind)) s += w * w;
    return sigma2 * s;
}

double normal_test(double estimate, double variance) {
    if (!(variance > 0.0)) throw Error(ErrorCode::InvalidArgument, "variance must be positive");
    return stats::two_sided_normal_p(estimate / std::sqrt(variance));
}

BootstrapResult bootstrap_test(std::span<const double> residuals, const PsiWeights& psi, const BCoefficients& b,
                               std::size_t k, EffectKind kind, double estimate, int n_boot, std::uint64_t seed) {
    if (residuals.empty()) throw Error(ErrorCode::TooFewResiduals, "bootstrap needs residuals");
    if (n_boot < 500) throw Error(ErrorCode::InvalidArgument, "n_boot must be at least 500");
    std::vector<double> pool(residuals.begin(), residuals.end());
    std::sort(pool.begin(), pool.end());
    const double centre = stats::mean(pool);
    for (double& e : pool) e -= centre;

    const std::vector<double> w = effect_weights(psi, b, k, kind);
    std::vector<double> draws(static_cast<std::size_t>(n_boot));
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::size_t extreme = 0;
    const double threshold = std::abs(estimate);
    for (std::size_t r = 0; r < draws.size(); ++r) {
        std::mt19937_64 rng(derive_seed(seed, r));
        double stat = 0.0;
        for (double wj : w) stat += wj * pool[pick(rng)];
        draws[r] = stat;
        if (std::abs(stat) >= threshold) ++extreme;
    }
    std::sort(draws.begin(), draws.end());
    BootstrapResult out;
    out.p_value = static_cast<double>(extreme + 1) / static_cast<double>(n_boot + 1);
    out.critical = {stats::quantile_sorted(draws, 0.025), stats::quantile_sorted(draws, 0.05),
                    stats::quantile_sorted(draws, 0.95), stats::quantile_sorted(draws, 0.975)};
    return out;
}

BootstrapResult bootstrap_test(const FittedModel& model, const PsiWeights& psi, const BCoefficients& b,
                               std::size_t k, EffectKind kind, double estimate, int n_boot, std::uint64_t seed) {
    return bootstrap_test(model.residuals.values(), psi, b, k, kind, estimate, n_boot, seed);
}

TimeSeries counterfactual_covariate(const TimeSeries& v_observed, const ForecastResult& v_counterfactual, Date t_n) {
    if (v_observed.end_date() < t_n) return v_observed;
    if (v_counterfactual.point.start_date() != t_n) {
        throw Error(ErrorCode::DateMisalignment, "counterfactual forecast starts on " +
                                                     v_counterfactual.point.start_date().to_string() +
                                                     ", expected " + t_n.to_string());
    }
    if (t_n < v_observed.start_date()) {
        throw Error(ErrorCode::DateMisalignment, "splice date " + t_n.to_string() + " precedes the series");
    }
    const std::size_t pre = static_cast<std::size_t>(t_n - v_observed.start_date());
    const std::size_t post = v_observed.size() - pre;
    if (v_counterfactual.point.size() < post) {
        throw Error(ErrorCode::DateMisalignment, "counterfactual forecast ends before " +
                                                     v_observed.end_date().to_string());
    }
    std::vector<double> out(v_observed.values().begin(), v_observed.values().begin() + static_cast<long>(pre));
    for (std::size_t h = 0; h < post; ++h) out.push_back(v_counterfactual.point[h]);
    return TimeSeries(v_observed.start_date(), std::move(out), v_observed.name());
}

CovariateMatrix lagged_differences(const TimeSeries& v, const std::string& name, int lags) {
    if (lags <= 0) throw Error(ErrorCode::InvalidArgument, "lags must be positive");
    const auto n = static_cast<Eigen::Index>(v.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, lags, kNaN);
    std::vector<std::string> names;
    for (int i = 1; i <= lags; ++i) {
        names.push_back(name + "_d_lag" + std::to_string(i));
        for (Eigen::Index t = i + 1; t < n; ++t) {
            const auto s = static_cast<std::size_t>(t - i);
            m(t, i - 1) = v[s] - v[s - 1];
        }
    }
    return CovariateMatrix(v.start_date(), std::move(names), std::move(m));
}

double multiplicative(double effect_log) { return std::expm1(effect_log); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
    return splitmix(splitmix(splitmix(seed) ^ a) ^ (b * 0xD1B54A32D192ED03ULL));
}

ResidualDiagnostics residual_diagnostics(const FittedModel& model) {
    ResidualDiagnostics out;
    const auto r = model.residuals.values();
    out.mean = stats::mean(r);
    out.variance = stats::variance(r);
    const auto fitted = static_cast<std::size_t>(model.spec.arma_count());
    const std::size_t lags = std::min(std::max<std::size_t>(10, fitted + 5), r.size() - 1);
    if (lags > fitted) out.ljung_box = ljung_box(r, lags, fitted);
    const std::size_t acf_lags = std::min<std::size_t>(10, r.size() - 1);
    const auto a = acf(r, acf_lags);
    out.acf.assign(a.begin() + 1, a.end());
    return out;
}

InterventionResult analyze_intervention(const TimeSeries& y, const CovariateMatrix& X,
                                        const Intervention& intervention, std::span<const int> horizons,
                                        const AnalysisOptions& options, std::size_t index) {
    InterventionResult out;
    out.intervention = intervention;
    try {
        if (options.candidates.empty()) throw Error(ErrorCode::InvalidArgument, "no model specification given");
        if (!y.contains(intervention.date) || intervention.date == y.start_date()) {
            throw Error(ErrorCode::InvalidSchedule, "intervention date " + intervention.date.to_string() +
                                                        " is not inside the series");
        }
        const TimeSeries pre = y.between(y.start_date(), intervention.date - 1);
        if (options.candidates.size() == 1) {
            out.model = fit(options.candidates[0], pre, X, options.fit);
        } else {
            OrderSelection sel = select_order(pre, X, options.candidates, options.fit);
            out.candidates = std::move(sel.candidates);
            out.model = std::move(sel.best);
        }
        const FittedModel& model = *out.model;
        out.diagnostics = residual_diagnostics(model);

        const bool pulse = intervention.kind == InterventionKind::Pulse;
        std::vector<int> ks = pulse ? std::vector<int>{1} : std::vector<int>(horizons.begin(), horizons.end());
        if (ks.empty()) throw Error(ErrorCode::InvalidArgument, "no horizons for '" + intervention.label + "'");
        const auto K = static_cast<std::size_t>(*std::max_element(ks.begin(), ks.end()));

        const std::size_t available = static_cast<std::size_t>(y.end_date() - intervention.date) + 1;
        if (K > available) {
            throw Error(ErrorCode::HorizonExceedsData, "horizon " + std::to_string(K) + " runs past " +
                                                           y.end_date().to_string());
        }
        const ForecastResult fc = forecast(model, K, X);
        const PsiWeights psi = level_psi_weights(model, K);
        const std::vector<double> points = point_effects(y, fc, intervention.date, K);
        const double sigma2 = model.coef.sigma2;

        std::uint64_t counter = 0;
        auto estimate = [&](EffectKind kind, std::size_t k) {
            const std::span<const double> head(points.data(), k);
            EffectKind weights_kind = kind == EffectKind::Contemporaneous ? EffectKind::Point : kind;
            EffectEstimate e;
            e.kind = kind;
            e.horizon = static_cast<int>(k);
            switch (kind) {
                case EffectKind::Point:
                case EffectKind::Contemporaneous: e.value = points[k - 1]; break;
                case EffectKind::Cumulative: e.value = cumulative_effect(head); break;
                case EffectKind::TemporalAverage: e.value = temporal_average_effect(head); break;
            }
            const double var = null_variance(psi, options.b, sigma2, k, weights_kind);
            e.std_error_normal = std::sqrt(var);
            e.p_value_normal = normal_test(e.value, var);
            const std::uint64_t stream = counter++;
            if (options.n_boot > 0) {
                const BootstrapResult br = bootstrap_test(model, psi, options.b, k, weights_kind, e.value,
                                                          options.n_boot, derive_seed(options.seed, index, stream));
                e.p_value_bootstrap = br.p_value;
                e.bootstrap_critical = br.critical;
            } else {
                e.p_value_bootstrap = kNaN;
                e.bootstrap_critical = nan_critical();
            }
            e.multiplicative = multiplicative(e.value);
            out.estimates.push_back(e);
        };
        if (pulse) {
            estimate(EffectKind::Contemporaneous, 1);
        } else {
            for (int k : ks) {
                const auto kk = static_cast<std::size_t>(k);
                estimate(EffectKind::Point, kk);
                estimate(EffectKind::Cumulative, kk);
                estimate(EffectKind::TemporalAverage, kk);
            }
        }

        CounterfactualPath& path = out.path;
        const double z = stats::normal_quantile(0.975);
        const std::size_t at = *y.index_of(intervention.date);
        for (std::size_t h = 0; h < K; ++h) {
            double lo = 0.0, hi = 0.0;
            if (options.bootstrap_bands && options.n_boot > 0) {
                const BootstrapResult br =
                    bootstrap_test(model, psi, options.b, h + 1, EffectKind::Point, points[h], options.n_boot,
                                   derive_seed(options.seed, index, 1'000'000 + h));
                lo = br.critical.q025;
                hi = br.critical.q975;
            } else {
                const double sd = std::sqrt(null_variance(psi, options.b, sigma2, h + 1, EffectKind::Point));
                lo = -z * sd;
                hi = z * sd;
            }
            path.dates.push_back(intervention.date + static_cast<long>(h));
            path.observed.push_back(y[at + h]);
            path.forecast.push_back(fc.point[h]);
            path.lower95.push_back(fc.point[h] + lo);
            path.upper95.push_back(fc.point[h] + hi);
            path.effect.push_back(points[h]);
            path.effect_lower95.push_back(points[h] - hi);
            path.effect_upper95.push_back(points[h] - lo);
        }
        out.ok = true;
    } catch (const Error& e) {
        out.ok = false;
        out.error = std::string(to_string(e.code())) + ": " + e.what();
    }
    return out;
}

CausalReport analyze(const TimeSeries& y, const CovariateMatrix& X, const InterventionSchedule& schedule,
                     std::span<const std::vector<int>> horizons, const AnalysisOptions& options) {
    options.b.validate();
    schedule.validate(y, horizons, options.min_pre_observations);
    CausalReport report;
    if (schedule.empty()) {
        if (options.candidates.empty()) throw Error(ErrorCode::InvalidArgument, "no model specification given");
        if (options.candidates.size() == 1) {
            report.full_model = fit(options.candidates[0], y, X, options.fit);
        } else {
            OrderSelection sel = select_order(y, X, options.candidates, options.fit);
            report.full_candidates = std::move(sel.candidates);
            report.full_model = std::move(sel.best);
        }
        return report;
    }
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        report.interventions.push_back(
            analyze_intervention(y, X, schedule[i], horizons_for(horizons, i), options, i));
    }
    return report;
}

}  // namespace carima
