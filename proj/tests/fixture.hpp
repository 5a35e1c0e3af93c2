#pragma once

// Synthetic Garman-Klass study: log volatility follows an ARMA(2,1) with the
// CME-column coefficients and a +0.77 step from the CME launch, encoded as
// OHLC bars, plus two unrelated covariates.

#include "carima/causal.hpp"
#include "carima/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace fixture {

inline const carima::Date kStart = carima::Date::parse("2014-05-03");
inline const carima::Date kCme = carima::Date::parse("2017-12-18");
inline constexpr double kEffect = 0.77;
inline constexpr std::size_t kDays = 1325 + 21;

inline carima::ModelSpec cme_spec() {
    carima::ModelSpec s;
    s.p = 2;
    s.q = 1;
    return s;
}

inline carima::Coefficients cme_truth() {
    carima::Coefficients c;
    c.phi = {1.255, -0.283};
    c.theta = {-0.785};
    c.constant = -3.767;
    c.sigma2 = 0.251;
    return c;
}

inline std::string g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void write(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

inline void write_cme_fixture(const std::filesystem::path& dir, std::uint64_t seed) {
    using namespace carima;
    std::filesystem::create_directories(dir);
    const TimeSeries log_gk = inject_effect(
        simulate_sarima(cme_spec(), cme_truth(), kDays, kStart, {}, seed), {InterventionKind::Persistent, kCme, kEffect});

    std::mt19937_64 rng(derive_seed(seed, 1));
    std::normal_distribution<double> z;
    std::string ohlc = "date,open,high,low,close\n";
    double price = 450.0;
    const double scale = 1.034 * std::sqrt(0.5);
    for (std::size_t t = 0; t < log_gk.size(); ++t) {
        price *= std::exp(0.02 * z(rng));
        const double range = std::exp(log_gk[t]) / scale;
        const double hi = price * std::exp(0.5 * range), lo = price * std::exp(-0.5 * range);
        ohlc += log_gk.date_at(t).to_string() + "," + g(price) + "," + g(hi) + "," + g(lo) + "," + g(price) + "\n";
    }
    write(dir / "ohlc.csv", ohlc);

    std::string cov = "date,m1,eurusd_vol\n";
    double m1 = 8.0;
    for (std::size_t t = 0; t <= kDays; ++t) {
        m1 += 0.001 + 0.002 * z(rng);
        cov += (kStart + static_cast<long>(t) - 1).to_string() + "," + g(m1) + "," + g(-5.0 + 0.6 * z(rng)) + "\n";
    }
    write(dir / "covariates.csv", cov);

    write(dir / "config.json", R"({
  "outcome": {"file": "ohlc.csv", "column": "gk", "ohlc_to_gk": true, "transform": "log"},
  "covariates": [
    {"file": "covariates.csv", "column": "eurusd_vol"},
    {"file": "covariates.csv", "column": "m1", "differencing": "d1"}
  ],
  "model": {"p": 2, "d": 0, "q": 1},
  "interventions": [
    {"date": "2017-08-02", "kind": "pulse", "label": "Ann.1"},
    {"date": "2017-10-31", "kind": "pulse", "label": "Ann.2"},
    {"date": "2017-12-01", "kind": "pulse", "label": "Ann.3"},
    {"date": "2017-12-04", "kind": "pulse", "label": "Ann.4"},
    {"date": "2017-12-10", "kind": "persistent", "label": "CBOE", "horizons": [7]},
    {"date": "2017-12-18", "kind": "persistent", "label": "CME", "horizons": [7, 14, 21]}
  ],
  "bootstrap": {"n_boot": 10000, "seed": 20171218},
  "output_dir": "out"
}
)");
}

}  // namespace fixture
