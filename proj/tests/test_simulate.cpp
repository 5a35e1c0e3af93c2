#include "doctest.h"

#include "carima/diagnostics.hpp"
#include "carima/error.hpp"
#include "carima/simulate.hpp"
#include "carima/stats.hpp"

#include <cmath>

using namespace carima;

namespace {

ModelSpec arma_spec(int p, int q, bool constant = true) {
    ModelSpec s;
    s.p = p;
    s.q = q;
    s.include_constant = constant;
    return s;
}

SimulationConfig h0_config() {
    SimulationConfig c;
    c.spec = arma_spec(1, 1, false);
    c.truth.phi = {0.5};
    c.truth.theta = {0.3};
    c.truth.sigma2 = 1.0;
    c.n = 300;
    c.intervention_date = c.start + 270;
    c.n_reps = 400;
    c.seed = 77;
    return c;
}

}  // namespace

TEST_CASE("simulate_sarima basics") {
    const Date start = Date::parse("2014-05-03");
    const ErrorModel gaussian;
    SUBCASE("white noise around a constant") {
        Coefficients c;
        c.constant = -3.7;
        c.sigma2 = 0.25;
        const TimeSeries y = simulate_sarima(arma_spec(0, 0), c, 5000, start, gaussian, 1);
        CHECK(y.size() == 5000);
        CHECK(y.start_date() == start);
        CHECK(std::abs(stats::mean(y.values()) + 3.7) < 3 * 0.5 / std::sqrt(5000.0));
    }
    SUBCASE("AR(1) lag-one autocorrelation") {
        Coefficients c;
        c.phi = {0.9};
        const TimeSeries y = simulate_sarima(arma_spec(1, 0, false), c, 50'000, start, gaussian, 2);
        CHECK(std::abs(acf(y.values(), 1)[1] - 0.9) < 0.02);
    }
    SUBCASE("deterministic per seed") {
        Coefficients c;
        c.phi = {0.4};
        c.theta = {-0.2};
        const TimeSeries a = simulate_sarima(arma_spec(1, 1), c, 300, start, gaussian, 3);
        CHECK(a == simulate_sarima(arma_spec(1, 1), c, 300, start, gaussian, 3));
        CHECK_FALSE(a == simulate_sarima(arma_spec(1, 1), c, 300, start, gaussian, 4));
    }
    SUBCASE("integration with zero initial conditions") {
        Coefficients c;
        c.phi = {0.4};
        ModelSpec integrated = arma_spec(1, 0, false);
        integrated.ord = {1, 0, 1};
        const TimeSeries level = simulate_sarima(integrated, c, 200, start, gaussian, 5);
        const TimeSeries stationary = simulate_sarima(arma_spec(1, 0, false), c, 200, start, gaussian, 5);
        CHECK(level[0] == stationary[0]);
        const auto diff = difference(level.values(), integrated.ord);
        for (std::size_t t = 0; t < diff.size(); ++t) CHECK(diff[t] == doctest::Approx(stationary[t + 1]).epsilon(1e-12));
    }
    SUBCASE("heavy-tailed and resampled errors keep the variance") {
        Coefficients c;
        c.sigma2 = 2.0;
        ErrorModel t;
        t.kind = ErrorDistribution::StudentT;
        t.df = 6;
        const TimeSeries yt = simulate_sarima(arma_spec(0, 0, false), c, 100'000, start, t, 6);
        CHECK(stats::variance(yt.values()) == doctest::Approx(2.0).epsilon(0.05));
        ErrorModel r;
        r.kind = ErrorDistribution::Resample;
        r.pool = {-3, -1, 0, 0.5, 4, 10};
        const TimeSeries yr = simulate_sarima(arma_spec(0, 0, false), c, 100'000, start, r, 7);
        CHECK(stats::variance(yr.values()) == doctest::Approx(2.0).epsilon(0.05));
        CHECK(std::abs(stats::mean(yr.values())) < 0.03);
        ErrorModel bad;
        bad.kind = ErrorDistribution::StudentT;
        bad.df = 2;
        CHECK_THROWS_AS((void)simulate_sarima(arma_spec(0, 0), c, 10, start, bad, 1), Error);
    }
    SUBCASE("non-stationary truth") {
        Coefficients c;
        c.phi = {1.0};
        try {
            (void)simulate_sarima(arma_spec(1, 0), c, 100, start, gaussian, 1);
            FAIL("expected NonStationaryParams");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NonStationaryParams);
        }
        Coefficients m;
        m.theta = {-1.5};
        CHECK_THROWS_AS((void)simulate_sarima(arma_spec(0, 1), m, 100, start, gaussian, 1), Error);
    }
}

TEST_CASE("inject_effect") {
    const Date start = Date::parse("2020-01-01");
    const TimeSeries ts(start, std::vector<double>(100, 0.0));
    CHECK(inject_effect(ts, {InterventionKind::Persistent, start + 10, 0.0}) == ts);
    const TimeSeries pulse = inject_effect(ts, {InterventionKind::Pulse, start + 10, 2.0});
    int changed = 0;
    for (std::size_t t = 0; t < 100; ++t) changed += pulse[t] != ts[t] ? 1 : 0;
    CHECK(changed == 1);
    CHECK(pulse[10] == 2.0);
    const TimeSeries step = inject_effect(ts, {InterventionKind::Persistent, start + 50, 1.0});
    CHECK(stats::mean(step.values().subspan(50)) - stats::mean(step.values().first(50)) == 1.0);
    try {
        (void)inject_effect(ts, {InterventionKind::Pulse, start + 100, 1.0});
        FAIL("expected DateOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DateOutOfRange);
    }
}

TEST_CASE("run_experiment under the null") {
    SimulationConfig c = h0_config();
    c.threads = 1;
    const ExperimentResult serial = run_experiment(c);
    c.threads = 4;
    const ExperimentResult parallel = run_experiment(c);
    REQUIRE(serial.cells.size() == 9);
    CHECK(serial.failures == 0);
    for (std::size_t i = 0; i < serial.cells.size(); ++i) {
        const CellSummary& s = serial.cells[i];
        CHECK(s.count == 400);
        CHECK(s.mean == parallel.cells[i].mean);
        CHECK(s.rejection_normal == parallel.cells[i].rejection_normal);
        CHECK(s.rejection_normal >= 0.0);
        CHECK(s.rejection_normal <= 1.0);
        CHECK(std::isnan(s.rejection_bootstrap));
        CHECK(std::abs(s.mean) <= 3 * std::sqrt(s.formula_variance / 400.0));
        // Binomial 99.9% band around the nominal size for 400 reps.
        CHECK(s.rejection_normal > 0.05 - 3.3 * std::sqrt(0.05 * 0.95 / 400));
        CHECK(s.rejection_normal < 0.05 + 3.3 * std::sqrt(0.05 * 0.95 / 400));
    }
    CHECK(serial.reps[17].estimates[4].value == parallel.reps[17].estimates[4].value);
}

TEST_CASE("empirical variance of the null point effect matches the formula") {
    SimulationConfig c = h0_config();
    c.n_reps = 2000;
    const ExperimentResult r = run_experiment(c);
    for (const CellSummary& s : r.cells) {
        CHECK(std::abs(s.empirical_variance / s.formula_variance - 1.0) < 0.10);
    }
}

TEST_CASE("integrated outcome calibrates with level psi weights") {
    SimulationConfig c = h0_config();
    c.spec.ord = {1, 0, 1};
    c.truth.theta = {};
    c.spec.q = 0;
    c.n_reps = 2000;
    const ExperimentResult r = run_experiment(c);
    for (const CellSummary& s : r.cells) {
        CHECK(std::abs(s.empirical_variance / s.formula_variance - 1.0) < 0.10);
        CHECK(s.rejection_normal >= 0.035);
        CHECK(s.rejection_normal <= 0.065);
    }
}

TEST_CASE("run_experiment with an effect and the bootstrap") {
    SimulationConfig c = h0_config();
    c.n_reps = 100;
    c.n_boot = 500;
    c.horizons = {7};
    c.effect = 2.0;
    c.use_true_params = false;
    c.spec.include_constant = true;
    const ExperimentResult r = run_experiment(c);
    REQUIRE(r.cells.size() == 3);
    const CellSummary& avg = r.cells[2];
    CHECK(avg.kind == EffectKind::TemporalAverage);
    CHECK(avg.truth == 2.0);
    CHECK(r.cells[1].truth == 14.0);
    CHECK(std::abs(avg.bias) < 0.25);
    CHECK(avg.rejection_bootstrap > 0.5);
    CHECK(avg.rmse >= std::abs(avg.bias));
}

TEST_CASE("run_experiment aborts on widespread failures") {
    SimulationConfig c = h0_config();
    c.n_reps = 20;
    c.errors.kind = ErrorDistribution::Resample;
    c.errors.pool = {1.0};
    try {
        (void)run_experiment(c);
        FAIL("expected ExperimentAborted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ExperimentAborted);
    }
    SimulationConfig bad = h0_config();
    bad.n = 20;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("re-estimation recovers the simulating parameters") {
    Coefficients truth;
    truth.phi = {0.6};
    truth.theta = {0.3};
    truth.constant = 1.5;
    const int reps = 100;
    std::vector<double> phi, theta, mu;
    for (int r = 0; r < reps; ++r) {
        const TimeSeries y = simulate_sarima(arma_spec(1, 1), truth, 1000, Date::parse("2014-05-03"), {},
                                             derive_seed(11, static_cast<std::uint64_t>(r)));
        FitOptions fo;
        fo.compute_covariance = false;
        const FittedModel m = fit(arma_spec(1, 1), y, {}, fo);
        phi.push_back(m.coef.phi[0]);
        theta.push_back(m.coef.theta[0]);
        mu.push_back(m.coef.constant);
    }
    auto within = [&](const std::vector<double>& v, double target) {
        const double se = std::sqrt(stats::variance(v) / reps);
        return std::abs(stats::mean(v) - target) < 3 * se;
    };
    CHECK(within(phi, 0.6));
    CHECK(within(theta, 0.3));
    CHECK(within(mu, 1.5));
}
