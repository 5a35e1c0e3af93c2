#include "carima/config.hpp"

#include "carima/error.hpp"
#include "carima/ingest.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace carima {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::ConfigError, where + ": " + what);
}

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) bad(where, "expected an object");
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) bad(where, "unknown key '" + k + "'");
    }
}

template <typename T>
T get(const json& j, const char* key, const std::string& where, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        bad(where + "." + key, "has the wrong type");
    }
}

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) bad(where, "missing '" + std::string(key) + "'");
    return get<T>(j, key, where, T{});
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

Date parse_date(const std::string& text, const std::string& where) {
    Date d;
    if (!Date::try_parse(text, d)) bad(where, "'" + text + "' is not a YYYY-MM-DD date");
    return d;
}

Transform parse_transform(const std::string& text, const std::string& where) {
    if (text == "none") return Transform::None;
    if (text == "log") return Transform::Log;
    bad(where, "transform must be 'log' or 'none'");
}

std::vector<int> parse_horizons(const json& j, const char* key, const std::string& where, std::vector<int> fallback) {
    std::vector<int> h = get<std::vector<int>>(j, key, where, std::move(fallback));
    for (int k : h) {
        if (k <= 0) bad(where + "." + key, "horizons must be positive");
    }
    return h;
}

ModelConfig parse_model(const json& j, const std::string& where) {
    allow_keys(j, where, {"p", "d", "q", "P", "D", "Q", "s", "include_constant", "grid"});
    ModelConfig m;
    m.base.p = get<int>(j, "p", where, 0);
    m.base.q = get<int>(j, "q", where, 0);
    m.base.P = get<int>(j, "P", where, 0);
    m.base.Q = get<int>(j, "Q", where, 0);
    m.base.ord.d = get<int>(j, "d", where, 0);
    m.base.ord.D = get<int>(j, "D", where, 0);
    m.base.ord.s = get<int>(j, "s", where, 1);
    m.base.include_constant = get<bool>(j, "include_constant", where, true);
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        const std::string gw = where + ".grid";
        allow_keys(g, gw, {"p_max", "q_max", "P_max", "Q_max"});
        m.grid = true;
        m.p_max = get<int>(g, "p_max", gw, 0);
        m.q_max = get<int>(g, "q_max", gw, 0);
        m.P_max = get<int>(g, "P_max", gw, 0);
        m.Q_max = get<int>(g, "Q_max", gw, 0);
        if (m.p_max < 0 || m.q_max < 0 || m.P_max < 0 || m.Q_max < 0) bad(gw, "bounds must be nonnegative");
        m.base.p = m.base.q = m.base.P = m.base.Q = 0;
    }
    try {
        m.base.validate();
    } catch (const Error& e) {
        bad(where, e.what());
    }
    return m;
}

json parse_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
    }
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

std::vector<ModelSpec> ModelConfig::candidates() const {
    if (!grid) return {base};
    return order_grid(base, p_max, q_max, P_max, Q_max);
}

AnalysisConfig parse_analysis_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    const json j = parse_document(json_text);
    allow_keys(j, "config", {"outcome", "covariates", "model", "interventions", "horizons", "b", "bootstrap",
                             "bands", "min_pre_observations", "output_dir", "mediator"});
    AnalysisConfig c;

    if (!j.contains("outcome")) bad("config", "missing 'outcome'");
    const json& o = j.at("outcome");
    allow_keys(o, "outcome", {"file", "column", "transform", "ohlc_to_gk"});
    c.outcome.file = resolve(base_dir, require<std::string>(o, "file", "outcome"));
    c.outcome.ohlc_to_gk = get<bool>(o, "ohlc_to_gk", "outcome", false);
    c.outcome.column = get<std::string>(o, "column", "outcome", c.outcome.ohlc_to_gk ? "gk" : "value");
    c.outcome.transform = parse_transform(get<std::string>(o, "transform", "outcome", "none"), "outcome.transform");

    if (j.contains("covariates")) {
        if (!j.at("covariates").is_array()) bad("covariates", "expected an array");
        std::size_t i = 0;
        for (const json& cv : j.at("covariates")) {
            const std::string where = "covariates[" + std::to_string(i++) + "]";
            allow_keys(cv, where, {"file", "column", "name", "differencing"});
            CovariateConfig cc;
            cc.file = resolve(base_dir, require<std::string>(cv, "file", where));
            cc.column = require<std::string>(cv, "column", where);
            cc.name = get<std::string>(cv, "name", where, cc.column);
            const std::string diff = get<std::string>(cv, "differencing", where, "none");
            if (diff == "none") cc.differencing = 0;
            else if (diff == "d1") cc.differencing = 1;
            else if (diff == "d2") cc.differencing = 2;
            else bad(where + ".differencing", "must be 'none', 'd1' or 'd2'");
            for (const auto& prev : c.covariates) {
                if (prev.name == cc.name) bad(where, "duplicate regressor name '" + cc.name + "'");
            }
            c.covariates.push_back(cc);
        }
    }

    if (!j.contains("model")) bad("config", "missing 'model'");
    c.model = parse_model(j.at("model"), "model");
    for (const auto& cv : c.covariates) c.model.base.regressors.push_back(cv.name);

    c.horizons = parse_horizons(j, "horizons", "config", {7});
    if (j.contains("interventions")) {
        if (!j.at("interventions").is_array()) bad("interventions", "expected an array");
        std::size_t i = 0;
        for (const json& iv : j.at("interventions")) {
            const std::string where = "interventions[" + std::to_string(i++) + "]";
            allow_keys(iv, where, {"date", "kind", "label", "horizons"});
            InterventionConfig ic;
            ic.intervention.date = parse_date(require<std::string>(iv, "date", where), where + ".date");
            try {
                ic.intervention.kind = parse_intervention_kind(get<std::string>(iv, "kind", where, "persistent"));
            } catch (const Error& e) {
                bad(where + ".kind", e.what());
            }
            ic.intervention.label = get<std::string>(iv, "label", where, "intervention " + std::to_string(i));
            ic.horizons = parse_horizons(iv, "horizons", where, {});
            c.interventions.push_back(ic);
        }
    }

    c.b = get<std::vector<double>>(j, "b", "config", {1.0});
    if (c.b.empty() || c.b[0] != 1.0) bad("b", "must start with 1");
    if (j.contains("bootstrap")) {
        const json& bs = j.at("bootstrap");
        allow_keys(bs, "bootstrap", {"n_boot", "seed"});
        c.n_boot = get<int>(bs, "n_boot", "bootstrap", 10'000);
        c.seed = get<std::uint64_t>(bs, "seed", "bootstrap", 20171218);
        if (c.n_boot != 0 && c.n_boot < 500) bad("bootstrap.n_boot", "must be 0 or at least 500");
    }
    const std::string bands = get<std::string>(j, "bands", "config", "normal");
    if (bands != "normal" && bands != "bootstrap") bad("bands", "must be 'normal' or 'bootstrap'");
    c.bootstrap_bands = bands == "bootstrap";
    c.min_pre_observations = get<std::size_t>(j, "min_pre_observations", "config", 30);
    c.output_dir = resolve(base_dir, get<std::string>(j, "output_dir", "config", "carima_out"));

    if (j.contains("mediator")) {
        const json& m = j.at("mediator");
        allow_keys(m, "mediator", {"file", "column", "name", "transform", "model", "lags"});
        MediatorConfig mc;
        mc.file = resolve(base_dir, require<std::string>(m, "file", "mediator"));
        mc.column = require<std::string>(m, "column", "mediator");
        mc.name = get<std::string>(m, "name", "mediator", mc.column);
        mc.transform = parse_transform(get<std::string>(m, "transform", "mediator", "none"), "mediator.transform");
        if (!m.contains("model")) bad("mediator", "missing 'model'");
        mc.model = parse_model(m.at("model"), "mediator.model");
        mc.lags = get<int>(m, "lags", "mediator", 3);
        if (mc.lags <= 0) bad("mediator.lags", "must be positive");
        c.mediator = mc;
    }
    return c;
}

AnalysisConfig load_analysis_config(const std::filesystem::path& path) {
    return parse_analysis_config(slurp(path), path.parent_path());
}

SimulationJob parse_simulation_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    const json j = parse_document(json_text);
    allow_keys(j, "config", {"model", "truth", "n", "start", "intervention_date", "effect", "errors", "n_reps",
                             "seed", "horizons", "n_boot", "use_true_params", "selection", "threads", "output_dir"});
    SimulationJob job;
    SimulationConfig& c = job.config;
    if (!j.contains("model")) bad("config", "missing 'model'");
    const ModelConfig model = parse_model(j.at("model"), "model");
    if (model.grid) bad("model", "the simulating model must be explicit; use 'selection' for a grid");
    c.spec = model.base;

    if (!j.contains("truth")) bad("config", "missing 'truth'");
    const json& t = j.at("truth");
    allow_keys(t, "truth", {"phi", "theta", "Phi", "Theta", "constant", "sigma2"});
    c.truth.phi = get<std::vector<double>>(t, "phi", "truth", {});
    c.truth.theta = get<std::vector<double>>(t, "theta", "truth", {});
    c.truth.Phi = get<std::vector<double>>(t, "Phi", "truth", {});
    c.truth.Theta = get<std::vector<double>>(t, "Theta", "truth", {});
    c.truth.constant = get<double>(t, "constant", "truth", 0.0);
    c.truth.sigma2 = get<double>(t, "sigma2", "truth", 1.0);
    if (c.truth.phi.size() != static_cast<std::size_t>(c.spec.p) ||
        c.truth.theta.size() != static_cast<std::size_t>(c.spec.q) ||
        c.truth.Phi.size() != static_cast<std::size_t>(c.spec.P) ||
        c.truth.Theta.size() != static_cast<std::size_t>(c.spec.Q)) {
        bad("truth", "coefficient counts do not match the model orders");
    }
    if (!c.spec.include_constant && c.truth.constant != 0.0) bad("truth.constant", "model has no constant");

    c.n = get<std::size_t>(j, "n", "config", 500);
    c.start = parse_date(get<std::string>(j, "start", "config", "2014-05-03"), "start");
    c.horizons = parse_horizons(j, "horizons", "config", {1, 7, 14});
    const int K = *std::max_element(c.horizons.begin(), c.horizons.end());
    const Date fallback = c.start + static_cast<long>(c.n) - K;
    c.intervention_date =
        j.contains("intervention_date")
            ? parse_date(require<std::string>(j, "intervention_date", "config"), "intervention_date")
            : fallback;
    if (j.contains("effect") && !j.at("effect").is_null()) {
        const json& e = j.at("effect");
        allow_keys(e, "effect", {"kind", "magnitude"});
        try {
            c.effect_kind = parse_intervention_kind(get<std::string>(e, "kind", "effect", "persistent"));
        } catch (const Error& err) {
            bad("effect.kind", err.what());
        }
        c.effect = require<double>(e, "magnitude", "effect");
    }
    if (j.contains("errors")) {
        const json& e = j.at("errors");
        allow_keys(e, "errors", {"distribution", "df", "file", "column"});
        const std::string dist = get<std::string>(e, "distribution", "errors", "gaussian");
        if (dist == "gaussian") {
            c.errors.kind = ErrorDistribution::Gaussian;
        } else if (dist == "student_t") {
            c.errors.kind = ErrorDistribution::StudentT;
            c.errors.df = get<double>(e, "df", "errors", 5.0);
            if (!(c.errors.df > 2.0)) bad("errors.df", "must exceed 2");
        } else if (dist == "resample") {
            c.errors.kind = ErrorDistribution::Resample;
            const auto file = resolve(base_dir, require<std::string>(e, "file", "errors"));
            const TimeSeries pool = ingest_series(file, get<std::string>(e, "column", "errors", "residual"));
            c.errors.pool.assign(pool.values().begin(), pool.values().end());
        } else {
            bad("errors.distribution", "must be 'gaussian', 'student_t' or 'resample'");
        }
    }
    c.n_reps = get<int>(j, "n_reps", "config", 1000);
    c.seed = get<std::uint64_t>(j, "seed", "config", 20171218);
    c.n_boot = get<int>(j, "n_boot", "config", 0);
    c.use_true_params = get<bool>(j, "use_true_params", "config", true);
    if (j.contains("selection")) {
        ModelConfig sel = parse_model(j.at("selection"), "selection");
        if (!sel.grid) bad("selection", "needs a 'grid'");
        c.use_selection = true;
        c.grid = sel.candidates();
    }
    c.threads = get<unsigned>(j, "threads", "config", 0);
    job.output_dir = resolve(base_dir, get<std::string>(j, "output_dir", "config", "carima_out"));
    try {
        c.validate();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        bad("config", e.what());
    }
    return job;
}

SimulationJob load_simulation_config(const std::filesystem::path& path) {
    return parse_simulation_config(slurp(path), path.parent_path());
}

}  // namespace carima
