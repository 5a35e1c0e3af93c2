#include "carima/report.hpp"

#include "carima/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

namespace carima {

namespace {

using ojson = nlohmann::ordered_json;

std::size_t display_width(const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80 ? 1 : 0;
    return n;
}

std::string pad_left(const std::string& s, std::size_t width) {
    const std::size_t w = display_width(s);
    return w >= width ? s : std::string(width - w, ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
    const std::size_t w = display_width(s);
    return w >= width ? s : s + std::string(width - w, ' ');
}

std::string full(double v) {
    if (!std::isfinite(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

double coefficient_p(double value, double se) {
    if (!(se > 0.0) || !std::isfinite(se)) return std::numeric_limits<double>::quiet_NaN();
    return stats::two_sided_normal_p(value / se);
}

std::string display_name(const std::string& name) { return name == "const" ? "c" : name; }

double effect_p(const EffectEstimate& e, int n_boot) {
    return n_boot > 0 ? e.p_value_bootstrap : e.p_value_normal;
}

std::string effect_row_label(const EffectEstimate& e) {
    if (e.kind == EffectKind::Contemporaneous) return "tau";
    if (e.kind == EffectKind::TemporalAverage) return "tau_bar k=" + std::to_string(e.horizon);
    if (e.kind == EffectKind::Cumulative) return "Delta k=" + std::to_string(e.horizon);
    return "tau_k k=" + std::to_string(e.horizon);
}

struct Column {
    std::string label;
    const FittedModel* model = nullptr;
    const InterventionResult* result = nullptr;
};

std::vector<Column> columns_of(const CausalReport& report) {
    std::vector<Column> cols;
    if (report.full_model) cols.push_back({"full sample", &*report.full_model, nullptr});
    for (const auto& r : report.interventions) {
        cols.push_back({r.intervention.label, r.model ? &*r.model : nullptr, &r});
    }
    return cols;
}

std::string render_table(const std::vector<Column>& cols, const std::string& title, int n_boot) {
    constexpr std::size_t label_w = 18, col_w = 15;
    const std::size_t width = label_w + col_w * cols.size();
    const std::string heavy(width, '='), light(width, '-');
    std::ostringstream out;
    out << title << '\n' << heavy << '\n' << pad_right("", label_w);
    for (const auto& c : cols) out << pad_left(c.label, col_w);
    out << '\n' << light << '\n';

    std::vector<std::string> names;
    for (const auto& c : cols) {
        if (!c.model) continue;
        for (const auto& n : c.model->parameter_names()) {
            if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
        }
    }
    for (const auto& name : names) {
        std::string value_line = pad_right(display_name(name), label_w);
        std::string se_line = pad_right("", label_w);
        for (const auto& c : cols) {
            std::string v, s;
            if (c.model) {
                const auto pn = c.model->parameter_names();
                const auto it = std::find(pn.begin(), pn.end(), name);
                if (it != pn.end()) {
                    const auto i = static_cast<std::size_t>(it - pn.begin());
                    const double value = c.model->parameter_values()[i];
                    const double se = c.model->std_errors()[i];
                    v = format_fixed(value) + significance_stars(coefficient_p(value, se));
                    s = std::isfinite(se) ? "(" + format_fixed(se) + ")" : "(n/a)";
                }
            }
            value_line += pad_left(v, col_w);
            se_line += pad_left(s, col_w);
        }
        out << value_line << '\n' << se_line << '\n';
    }
    out << light << '\n';

    std::vector<std::string> effect_rows;
    for (const auto& c : cols) {
        if (!c.result) continue;
        for (const auto& e : c.result->estimates) {
            if (e.kind != EffectKind::Contemporaneous && e.kind != EffectKind::TemporalAverage) continue;
            const std::string label = effect_row_label(e);
            if (std::find(effect_rows.begin(), effect_rows.end(), label) == effect_rows.end()) effect_rows.push_back(label);
        }
    }
    if (!effect_rows.empty()) {
        for (const auto& row : effect_rows) {
            out << pad_right(row, label_w);
            for (const auto& c : cols) {
                std::string cell;
                if (c.result) {
                    for (const auto& e : c.result->estimates) {
                        if (effect_row_label(e) == row) cell = format_fixed(e.value) + significance_stars(effect_p(e, n_boot));
                    }
                }
                out << pad_left(cell, col_w);
            }
            out << '\n';
        }
        out << light << '\n';
    }

    auto stat_row = [&](const std::string& label, auto cell) {
        out << pad_right(label, label_w);
        for (const auto& c : cols) out << pad_left(c.model ? cell(*c.model) : std::string("failed"), col_w);
        out << '\n';
    };
    stat_row("Observations", [](const FittedModel& m) { return format_count(m.n_effective()); });
    stat_row("sigma^2", [](const FittedModel& m) { return format_fixed(m.coef.sigma2); });
    stat_row("BIC", [](const FittedModel& m) { return format_fixed(m.bic); });
    stat_row("Model", [](const FittedModel& m) { return m.spec.label(); });
    out << heavy << '\n';
    out << "Note: ·p<0.1; *p<0.05; **p<0.01; ***p<0.001\n";
    if (!effect_rows.empty()) {
        if (n_boot > 0) {
            out << "Effect stars use bootstrap p-values (" << format_count(static_cast<std::size_t>(n_boot))
                << " replicates); coefficient stars use Normal p-values.\n";
        } else {
            out << "Effect and coefficient stars use Normal p-values.\n";
        }
    }
    return out.str();
}

// Cumulative effects exponentiate to huge ratios; keep the column aligned.
std::string format_percent(double v) {
    if (!std::isfinite(v) || std::fabs(v) < 1e6) return format_fixed(v, 1);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

std::string render_effects(const CausalReport& report) {
    std::ostringstream out;
    bool any = false;
    for (const auto& r : report.interventions) {
        if (!r.ok) continue;
        if (!any) {
            out << pad_right("intervention", 16) << pad_right("kind", 18) << pad_left("k", 4) << pad_left("estimate", 11)
                << pad_left("se", 9) << pad_left("p normal", 10) << pad_left("p boot", 9) << pad_left("mult. %", 12)
                << '\n';
            any = true;
        }
        for (const auto& e : r.estimates) {
            out << pad_right(r.intervention.label, 16) << pad_right(to_string(e.kind), 18)
                << pad_left(std::to_string(e.horizon), 4) << pad_left(format_fixed(e.value), 11)
                << pad_left(format_fixed(e.std_error_normal), 9) << pad_left(format_fixed(e.p_value_normal), 10)
                << pad_left(std::isfinite(e.p_value_bootstrap) ? format_fixed(e.p_value_bootstrap) : "-", 9)
                << pad_left(format_percent(100.0 * e.multiplicative), 12) << '\n';
        }
    }
    for (const auto& r : report.interventions) {
        if (!r.ok) out << "failed: " << r.intervention.label << " (" << r.intervention.date.to_string() << "): " << r.error << '\n';
    }
    return out.str();
}

ojson spec_json(const ModelSpec& s) {
    ojson j;
    j["label"] = s.label();
    j["p"] = s.p;
    j["d"] = s.ord.d;
    j["q"] = s.q;
    j["P"] = s.P;
    j["D"] = s.ord.D;
    j["Q"] = s.Q;
    j["s"] = s.ord.s;
    j["include_constant"] = s.include_constant;
    j["regressors"] = s.regressors;
    return j;
}

ojson model_json(const FittedModel& m) {
    ojson j;
    j["spec"] = spec_json(m.spec);
    const auto names = m.parameter_names();
    const auto values = m.parameter_values();
    const auto se = m.std_errors();
    ojson params = ojson::array();
    for (std::size_t i = 0; i < names.size(); ++i) {
        ojson p;
        p["name"] = names[i];
        p["estimate"] = num(values[i]);
        p["std_error"] = num(se[i]);
        p["p_value"] = num(coefficient_p(values[i], se[i]));
        params.push_back(p);
    }
    j["parameters"] = params;
    j["sigma2"] = num(m.coef.sigma2);
    j["loglik"] = num(m.loglik);
    j["bic"] = num(m.bic);
    j["n_obs"] = m.n_obs;
    j["n_effective"] = m.n_effective();
    j["converged"] = m.converged;
    j["sample_start"] = m.residuals.start_date().to_string();
    j["sample_end"] = m.last_date.to_string();
    return j;
}

ojson candidates_json(std::span<const CandidateRecord> cands) {
    ojson arr = ojson::array();
    for (const auto& c : cands) {
        ojson j;
        j["spec"] = c.spec.label();
        j["ok"] = c.ok;
        j["bic"] = c.ok ? num(c.bic) : ojson(nullptr);
        j["message"] = c.message;
        arr.push_back(j);
    }
    return arr;
}

ojson estimate_json(const EffectEstimate& e) {
    ojson j;
    j["kind"] = to_string(e.kind);
    j["horizon"] = e.horizon;
    j["value"] = num(e.value);
    j["std_error_normal"] = num(e.std_error_normal);
    j["p_value_normal"] = num(e.p_value_normal);
    j["p_value_bootstrap"] = num(e.p_value_bootstrap);
    j["bootstrap_critical"] = {{"q025", num(e.bootstrap_critical.q025)},
                               {"q05", num(e.bootstrap_critical.q05)},
                               {"q95", num(e.bootstrap_critical.q95)},
                               {"q975", num(e.bootstrap_critical.q975)}};
    j["multiplicative"] = num(e.multiplicative);
    return j;
}

ojson diagnostics_block(const ResidualDiagnostics& d) {
    ojson j;
    j["mean"] = num(d.mean);
    j["variance"] = num(d.variance);
    j["ljung_box"] = {{"lags", d.ljung_box.lags},
                      {"dof", d.ljung_box.dof},
                      {"statistic", num(d.ljung_box.statistic)},
                      {"p_value", num(d.ljung_box.p_value)}};
    ojson acf = ojson::array();
    for (double v : d.acf) acf.push_back(num(v));
    j["acf"] = acf;
    return j;
}

ojson report_block(const CausalReport& report) {
    ojson j;
    j["full_model"] = report.full_model ? model_json(*report.full_model) : ojson(nullptr);
    if (!report.full_candidates.empty()) j["full_candidates"] = candidates_json(report.full_candidates);
    ojson items = ojson::array();
    for (const auto& r : report.interventions) {
        ojson i;
        i["label"] = r.intervention.label;
        i["date"] = r.intervention.date.to_string();
        i["kind"] = to_string(r.intervention.kind);
        i["ok"] = r.ok;
        i["error"] = r.ok ? ojson(nullptr) : ojson(r.error);
        i["model"] = r.model ? model_json(*r.model) : ojson(nullptr);
        i["candidates"] = candidates_json(r.candidates);
        i["diagnostics"] = r.diagnostics ? diagnostics_block(*r.diagnostics) : ojson(nullptr);
        ojson est = ojson::array();
        for (const auto& e : r.estimates) est.push_back(estimate_json(e));
        i["estimates"] = est;
        ojson path = ojson::array();
        for (std::size_t h = 0; h < r.path.dates.size(); ++h) {
            path.push_back({{"date", r.path.dates[h].to_string()},
                            {"observed", num(r.path.observed[h])},
                            {"forecast", num(r.path.forecast[h])},
                            {"lower95", num(r.path.lower95[h])},
                            {"upper95", num(r.path.upper95[h])},
                            {"effect", num(r.path.effect[h])},
                            {"effect_lower95", num(r.path.effect_lower95[h])},
                            {"effect_upper95", num(r.path.effect_upper95[h])}});
        }
        i["counterfactual"] = path;
        items.push_back(i);
    }
    j["interventions"] = items;
    return j;
}

}  // namespace

std::string significance_stars(double p) {
    if (!std::isfinite(p)) return "";
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    if (p < 0.1) return "·";
    return "";
}

std::string format_fixed(double value, int decimals) {
    if (std::isnan(value)) return "NaN";
    if (std::isinf(value)) return value > 0 ? "Inf" : "-Inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, std::abs(value));
    std::string s(buf);
    const auto dot = s.find('.');
    std::string whole = s.substr(0, dot);
    const std::string frac = dot == std::string::npos ? "" : s.substr(dot);
    for (int i = static_cast<int>(whole.size()) - 3; i > 0; i -= 3) whole.insert(static_cast<std::size_t>(i), ",");
    const bool negative = value < 0 && s.find_first_not_of("0.,") != std::string::npos;
    return (negative ? "-" : "") + whole + frac;
}

std::string format_count(std::size_t value) {
    std::string s = std::to_string(value);
    for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(static_cast<std::size_t>(i), ",");
    return s;
}

std::string render_report_txt(const CausalReport& report, const ReportContext& ctx, const CausalReport* adjusted) {
    std::ostringstream out;
    out << render_table(columns_of(report), "C-ARIMA estimates for " + ctx.outcome + " (standard errors in parentheses)",
                        ctx.n_boot);
    const std::string effects = render_effects(report);
    if (!effects.empty()) out << '\n' << effects;
    if (adjusted) {
        out << '\n'
            << render_table(columns_of(*adjusted),
                            "Mediator-adjusted estimates for " + ctx.outcome + " (counterfactual mediator lags)",
                            ctx.n_boot);
        const std::string adj = render_effects(*adjusted);
        if (!adj.empty()) out << '\n' << adj;
    }
    return out.str();
}

std::string report_json(const CausalReport& report, const ReportContext& ctx, const CausalReport* adjusted) {
    ojson j;
    j["outcome"] = ctx.outcome;
    j["n_boot"] = ctx.n_boot;
    j["seed"] = ctx.seed;
    j["report"] = report_block(report);
    j["adjusted"] = adjusted ? report_block(*adjusted) : ojson(nullptr);
    return j.dump(2) + "\n";
}

std::string counterfactual_csv(const CausalReport& report) {
    std::ostringstream out;
    out << "intervention,date,observed,forecast,lower95,upper95,effect,effect_lower95,effect_upper95\n";
    for (const auto& r : report.interventions) {
        std::string label = r.intervention.label;
        if (label.find_first_of(",\"") != std::string::npos) {
            std::string q = "\"";
            for (char ch : label) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            label = q + "\"";
        }
        for (std::size_t h = 0; h < r.path.dates.size(); ++h) {
            out << label << ',' << r.path.dates[h].to_string() << ',' << full(r.path.observed[h]) << ','
                << full(r.path.forecast[h]) << ',' << full(r.path.lower95[h]) << ',' << full(r.path.upper95[h]) << ','
                << full(r.path.effect[h]) << ',' << full(r.path.effect_lower95[h]) << ','
                << full(r.path.effect_upper95[h]) << '\n';
        }
    }
    return out.str();
}

std::string fit_txt(const FittedModel& model, const std::string& outcome) {
    return render_table({{"full sample", &model, nullptr}},
                        "C-ARIMA estimates for " + outcome + " (standard errors in parentheses)", 0);
}

std::string fit_json(const FittedModel& model, std::span<const CandidateRecord> candidates) {
    ojson j;
    j["model"] = model_json(model);
    j["candidates"] = candidates_json(candidates);
    return j.dump(2) + "\n";
}

std::string diagnostics_json(const TimeSeries& y, const FittedModel& model, std::size_t max_lag) {
    ojson j;
    const auto r = model.residuals.values();
    const std::size_t lag_y = std::min(max_lag, y.size() - 1);
    const std::size_t lag_r = std::min(max_lag, r.size() - 1);
    auto arr = [](const std::vector<double>& v) {
        ojson a = ojson::array();
        for (std::size_t i = 1; i < v.size(); ++i) a.push_back(num(v[i]));
        return a;
    };
    j["model"] = model_json(model);
    j["series"] = {{"name", y.name()}, {"acf", arr(acf(y.values(), lag_y))}, {"pacf", arr(pacf(y.values(), lag_y))}};
    ojson lb = ojson::array();
    const auto fitted = static_cast<std::size_t>(model.spec.arma_count());
    for (std::size_t lags : {std::size_t{10}, std::size_t{20}, std::size_t{30}}) {
        if (lags <= fitted || lags >= r.size()) continue;
        const LjungBox t = ljung_box(r, lags, fitted);
        lb.push_back({{"lags", t.lags}, {"dof", t.dof}, {"statistic", num(t.statistic)}, {"p_value", num(t.p_value)}});
    }
    j["residuals"] = {{"mean", num(stats::mean(r))},
                      {"variance", num(stats::variance(r))},
                      {"acf", arr(acf(r, lag_r))},
                      {"pacf", arr(pacf(r, lag_r))},
                      {"ljung_box", lb}};
    return j.dump(2) + "\n";
}

std::string qq_csv(const FittedModel& model) {
    std::ostringstream out;
    out << "theoretical,sample\n";
    for (const auto& p : qq_points(model.residuals.values(), true)) out << full(p.theoretical) << ',' << full(p.sample) << '\n';
    return out.str();
}

std::string reps_csv(const ExperimentResult& result, const SimulationConfig& config) {
    std::ostringstream out;
    out << "rep,ok,sigma2";
    for (int k : config.horizons) {
        for (const char* kind : {"point", "cumulative", "temporal_average"}) {
            const std::string base = std::string(kind) + "_k" + std::to_string(k);
            out << ',' << base << ',' << base << "_se," << base << "_p_normal," << base << "_p_bootstrap";
        }
    }
    out << ",error\n";
    for (const auto& r : result.reps) {
        out << r.rep << ',' << (r.ok ? 1 : 0) << ',' << full(r.sigma2);
        const std::size_t cells = config.horizons.size() * 3;
        for (std::size_t c = 0; c < cells; ++c) {
            if (r.ok) {
                const auto& e = r.estimates[c];
                out << ',' << full(e.value) << ',' << full(e.std_error_normal) << ',' << full(e.p_value_normal) << ','
                    << full(e.p_value_bootstrap);
            } else {
                out << ",,,,";
            }
        }
        std::string err = r.error;
        for (char& ch : err) {
            if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
        }
        out << ',' << err << '\n';
    }
    return out.str();
}

std::string summary_json(const ExperimentResult& result, const SimulationConfig& config) {
    ojson j;
    j["spec"] = spec_json(config.spec);
    j["n"] = config.n;
    j["n_reps"] = config.n_reps;
    j["seed"] = config.seed;
    j["intervention_date"] = config.intervention_date.to_string();
    j["effect"] = config.effect ? ojson{{"kind", to_string(config.effect_kind)}, {"magnitude", *config.effect}}
                                : ojson(nullptr);
    j["errors"] = to_string(config.errors.kind);
    j["n_boot"] = config.n_boot;
    j["use_true_params"] = config.use_true_params;
    j["use_selection"] = config.use_selection;
    j["failures"] = result.failures;
    ojson cells = ojson::array();
    for (const auto& c : result.cells) {
        cells.push_back({{"kind", to_string(c.kind)},
                         {"horizon", c.horizon},
                         {"count", c.count},
                         {"truth", num(c.truth)},
                         {"mean", num(c.mean)},
                         {"bias", num(c.bias)},
                         {"rmse", num(c.rmse)},
                         {"empirical_variance", num(c.empirical_variance)},
                         {"formula_variance", num(c.formula_variance)},
                         {"rejection_normal", num(c.rejection_normal)},
                         {"rejection_bootstrap", num(c.rejection_bootstrap)},
                         {"empirical_q025", num(c.empirical_q025)},
                         {"empirical_q975", num(c.empirical_q975)},
                         {"normal_q025", num(c.normal_q025)},
                         {"normal_q975", num(c.normal_q975)}});
    }
    j["cells"] = cells;
    return j.dump(2) + "\n";
}

std::string error_json(const Error& error) {
    ojson j;
    j["error"] = {{"code", std::string(to_string(error.code()))}, {"message", error.what()}};
    return j.dump();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + path.parent_path().string() + ": " + ec.message());
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp, ec);
            throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        const std::string reason = ec.message();
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot rename into " + path.string() + ": " + reason);
    }
}

}  // namespace carima
