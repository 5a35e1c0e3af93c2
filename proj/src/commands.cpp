#include "carima/commands.hpp"

#include "carima/error.hpp"
#include "carima/ingest.hpp"
#include "carima/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace carima {

namespace {

TimeSeries transformed(TimeSeries ts, Transform t) { return t == Transform::Log ? log_transform(ts) : ts; }

/// The first date from which every column of X is available through the
/// remaining rows of y.
Date first_complete(const CovariateMatrix& X, Date fallback) {
    if (X.empty()) return fallback;
    const auto& v = X.values();
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
        if (!v.row(r).array().isNaN().any()) return X.start_date() + static_cast<long>(r);
    }
    throw Error(ErrorCode::MissingCovariate, "no date has every covariate available");
}

TimeSeries trim_to(const TimeSeries& y, Date from) {
    if (from <= y.start_date()) return y;
    if (y.end_date() < from) throw Error(ErrorCode::MissingCovariate, "covariates start after the outcome ends");
    return y.between(from, y.end_date());
}

AnalysisConfig load_config(const CommandOptions& o) {
    if (o.config.empty()) throw Error(ErrorCode::ConfigError, "--config is required");
    AnalysisConfig c = load_analysis_config(o.config);
    if (o.seed) c.seed = *o.seed;
    if (o.out) c.output_dir = *o.out;
    return c;
}

AnalysisOptions options_for(const AnalysisConfig& c) {
    AnalysisOptions a;
    a.candidates = c.model.candidates();
    a.b.b = c.b;
    a.n_boot = c.n_boot;
    a.seed = c.seed;
    a.min_pre_observations = c.min_pre_observations;
    a.bootstrap_bands = c.bootstrap_bands;
    return a;
}

struct FullFit {
    FittedModel model;
    std::vector<CandidateRecord> candidates;
};

FullFit fit_full(const AnalysisData& data, const AnalysisConfig& c) {
    const auto cands = c.model.candidates();
    FitOptions fo;
    if (cands.size() == 1) return {fit(cands[0], data.y, data.X, fo), {}};
    OrderSelection sel = select_order(data.y, data.X, cands, fo);
    return {std::move(sel.best), std::move(sel.candidates)};
}

/// Volume-adjusted analysis: per persistent intervention, the mediator is
/// replaced by its counterfactual forecast from t_n on and its lagged first
/// differences enter as extra regressors.
CausalReport mediated_analysis(const AnalysisConfig& c, const AnalysisData& data,
                               const std::vector<std::vector<int>>& horizons) {
    const MediatorConfig& m = *c.mediator;
    const TimeSeries v = transformed(ingest_series(m.file, m.column), m.transform).renamed(m.name);
    const auto v_cands = m.model.candidates();
    FitOptions fo;
    CausalReport report;
    for (std::size_t i = 0; i < c.interventions.size(); ++i) {
        const Intervention& iv = c.interventions[i].intervention;
        if (iv.kind != InterventionKind::Persistent) continue;
        InterventionResult r;
        r.intervention = iv;
        try {
            if (!v.contains(iv.date - 1)) throw Error(ErrorCode::DateMisalignment, "mediator does not cover " + (iv.date - 1).to_string());
            const TimeSeries v_pre = v.between(v.start_date(), iv.date - 1);
            const FittedModel vm = v_cands.size() == 1 ? fit(v_cands[0], v_pre, {}, fo)
                                                       : select_order(v_pre, {}, v_cands, fo).best;
            const long steps = v.end_date() - iv.date + 1;
            TimeSeries v_tilde = v;
            if (steps > 0) v_tilde = counterfactual_covariate(v, forecast(vm, static_cast<std::size_t>(steps)), iv.date);
            const CovariateMatrix lags = lagged_differences(v_tilde, m.name, m.lags);
            const CovariateMatrix X = data.X.merged(lags);
            const TimeSeries y = trim_to(data.y, first_complete(X, data.y.start_date()));
            AnalysisOptions opts = options_for(c);
            for (auto& spec : opts.candidates) {
                for (const auto& n : lags.names()) spec.regressors.push_back(n);
            }
            r = analyze_intervention(y, X, iv, horizons.size() == 1 ? horizons[0] : horizons[i], opts,
                                     1000 + i);
        } catch (const Error& e) {
            r.ok = false;
            r.error = std::string(to_string(e.code())) + ": " + e.what();
        }
        report.interventions.push_back(std::move(r));
    }
    return report;
}

std::string gk_csv(const TimeSeries& gk) {
    std::ostringstream out;
    out << "date," << gk.name() << '\n';
    char buf[32];
    for (std::size_t t = 0; t < gk.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%.17g", gk[t]);
        out << gk.date_at(t).to_string() << ',' << buf << '\n';
    }
    return out.str();
}

}  // namespace

AnalysisData load_analysis_data(const AnalysisConfig& c) {
    TimeSeries y = c.outcome.ohlc_to_gk ? garman_klass_series(ingest_ohlc(c.outcome.file), c.outcome.column)
                                        : ingest_series(c.outcome.file, c.outcome.column);
    y = transformed(y, c.outcome.transform);
    CovariateMatrix X;
    for (const auto& cv : c.covariates) {
        TimeSeries s = ingest_series(cv.file, cv.column).renamed(cv.name);
        if (cv.differencing > 0) s = difference(s, DifferenceOrders{cv.differencing, 0, 1});
        const std::vector<TimeSeries> col{s};
        X = X.merged(CovariateMatrix::from_series(col));
    }
    y = trim_to(y, first_complete(X, y.start_date()));
    return {std::move(y), std::move(X)};
}

void cmd_gk(const CommandOptions& o) {
    std::filesystem::path input = o.input;
    std::filesystem::path out_dir = o.out ? *o.out : std::filesystem::path("carima_out");
    if (input.empty()) {
        // fall back to the configured outcome file
        if (o.config.empty()) throw Error(ErrorCode::ConfigError, "gk needs --input or --config");
        const AnalysisConfig c = load_config(o);
        input = c.outcome.file;
        out_dir = c.output_dir;
    }
    const TimeSeries gk = garman_klass_series(ingest_ohlc(input), "gk");
    std::filesystem::path out = o.output;
    if (out.empty()) out = out_dir / "gk.csv";
    write_atomic(out, gk_csv(gk));
}

void cmd_fit(const CommandOptions& o) {
    const AnalysisConfig c = load_config(o);
    const AnalysisData data = load_analysis_data(c);
    const FullFit f = fit_full(data, c);
    write_atomic(c.output_dir / "fit.txt", fit_txt(f.model, data.y.name()));
    write_atomic(c.output_dir / "fit.json", fit_json(f.model, f.candidates));
}

void cmd_analyze(const CommandOptions& o) {
    const AnalysisConfig c = load_config(o);
    const AnalysisData data = load_analysis_data(c);
    std::vector<Intervention> ivs;
    std::vector<std::vector<int>> horizons;
    for (const auto& ic : c.interventions) {
        ivs.push_back(ic.intervention);
        horizons.push_back(ic.horizons.empty() ? c.horizons : ic.horizons);
    }
    const InterventionSchedule schedule(ivs);
    const AnalysisOptions opts = options_for(c);
    const CausalReport report = analyze(data.y, data.X, schedule, horizons, opts);
    std::optional<CausalReport> adjusted;
    if (c.mediator) adjusted = mediated_analysis(c, data, horizons);
    const ReportContext ctx{data.y.name(), c.n_boot, c.seed};
    const CausalReport* adj = adjusted ? &*adjusted : nullptr;
    write_atomic(c.output_dir / "report.txt", render_report_txt(report, ctx, adj));
    write_atomic(c.output_dir / "report.json", report_json(report, ctx, adj));
    write_atomic(c.output_dir / "counterfactual.csv", counterfactual_csv(report));
    if (adjusted) write_atomic(c.output_dir / "counterfactual_adjusted.csv", counterfactual_csv(*adjusted));
}

void cmd_simulate(const CommandOptions& o) {
    if (o.config.empty()) throw Error(ErrorCode::ConfigError, "--config is required");
    SimulationJob job = load_simulation_config(o.config);
    if (o.seed) job.config.seed = *o.seed;
    if (o.out) job.output_dir = *o.out;
    const ExperimentResult result = run_experiment(job.config);
    write_atomic(job.output_dir / "reps.csv", reps_csv(result, job.config));
    write_atomic(job.output_dir / "summary.json", summary_json(result, job.config));
}

void cmd_diagnose(const CommandOptions& o) {
    const AnalysisConfig c = load_config(o);
    const AnalysisData data = load_analysis_data(c);
    const FullFit f = fit_full(data, c);
    write_atomic(c.output_dir / "diagnostics.json", diagnostics_json(data.y, f.model, 30));
    write_atomic(c.output_dir / "qq.csv", qq_csv(f.model));
}

int run_command(const std::string& name, const CommandOptions& options, std::ostream& err) {
    try {
        if (name == "gk") cmd_gk(options);
        else if (name == "fit") cmd_fit(options);
        else if (name == "analyze") cmd_analyze(options);
        else if (name == "simulate") cmd_simulate(options);
        else if (name == "diagnose") cmd_diagnose(options);
        else throw Error(ErrorCode::InvalidArgument, "unknown command '" + name + "'");
        return 0;
    } catch (const Error& e) {
        err << error_json(e) << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << error_json(Error(ErrorCode::IoError, e.what())) << '\n';
        return 1;
    }
}

}  // namespace carima
