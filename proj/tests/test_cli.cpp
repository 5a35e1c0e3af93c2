#include "doctest.h"

#include "carima/commands.hpp"
#include "carima/config.hpp"
#include "carima/error.hpp"
#include "carima/ingest.hpp"
#include "carima/report.hpp"

#include "fixture.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace carima;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected carima::Error");
    return ErrorCode::InvalidArgument;
}

std::string message_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("carima_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

void put(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// The shipped fixture layout with a smaller bootstrap so the suite stays quick.
fs::path quick_fixture(const fs::path& dir, std::uint64_t seed) {
    fixture::write_cme_fixture(dir, seed);
    auto j = nlohmann::ordered_json::parse(slurp(dir / "config.json"));
    j["bootstrap"]["n_boot"] = 500;
    put(dir / "config.json", j.dump(2));
    return dir / "config.json";
}

}  // namespace

TEST_CASE("csv ingest") {
    TempDir tmp("ingest");
    put(tmp.path / "ok.csv", "date,value\n2014-05-03,1.5\n2014-05-04,2\n2014-05-05,-3e-2\n");
    const TimeSeries ts = ingest_series(tmp.path / "ok.csv", "value");
    CHECK(ts.size() == 3);
    CHECK(ts.start_date() == Date::parse("2014-05-03"));
    CHECK(ts[2] == doctest::Approx(-0.03));

    put(tmp.path / "quoted.csv", "\xEF\xBB\xBF\"date\",\"value\"\r\n\"2014-05-03\",\"1\"\r\n\r\n2014-05-04,2\r\n");
    CHECK(ingest_series(tmp.path / "quoted.csv", "value").size() == 2);

    put(tmp.path / "gap.csv", "date,value\n2014-05-03,1\n2014-05-04,2\n2014-05-06,3\n");
    CHECK(code_of([&] { (void)ingest_series(tmp.path / "gap.csv", "value"); }) == ErrorCode::GapInCalendar);
    CHECK(message_of([&] { (void)ingest_series(tmp.path / "gap.csv", "value"); }).find("2014-05-05") !=
          std::string::npos);

    put(tmp.path / "dup.csv", "date,value\n2014-05-03,1\n2014-05-03,2\n");
    CHECK(code_of([&] { (void)ingest_series(tmp.path / "dup.csv", "value"); }) == ErrorCode::DuplicateDate);

    put(tmp.path / "bad.csv", "date,value\n2014-05-03,1\n2014-05-04,abc\n");
    CHECK(code_of([&] { (void)ingest_series(tmp.path / "bad.csv", "value"); }) == ErrorCode::UnparseableValue);
    CHECK(message_of([&] { (void)ingest_series(tmp.path / "bad.csv", "value"); }).find("line 3") != std::string::npos);

    CHECK(code_of([&] { (void)ingest_series(tmp.path / "ok.csv", "nope"); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { (void)ingest_series(tmp.path / "missing.csv", "value"); }) == ErrorCode::IoError);

    put(tmp.path / "bars.csv",
        "date,Open,High,Low,Close\n2014-05-03,10,11,9,10.5\n2014-05-04,10,9,11,10\n");
    CHECK(code_of([&] { (void)ingest_ohlc(tmp.path / "bars.csv"); }) == ErrorCode::InvalidBar);
    CHECK(message_of([&] { (void)ingest_ohlc(tmp.path / "bars.csv"); }).find("line 3") != std::string::npos);
}

TEST_CASE("gk command on a flat bar") {
    TempDir tmp("gk");
    put(tmp.path / "flat.csv", "date,open,high,low,close\n2017-12-18,100,100,100,100\n");
    CommandOptions o;
    o.input = tmp.path / "flat.csv";
    o.output = tmp.path / "gk.csv";
    cmd_gk(o);
    CHECK(slurp(o.output) == "date,gk\n2017-12-18,0\n");
}

TEST_CASE("number and star rendering") {
    CHECK(significance_stars(0.03) == "*");
    CHECK(significance_stars(0.0005) == "***");
    CHECK(significance_stars(0.005) == "**");
    CHECK(significance_stars(0.07) == "·");
    CHECK(significance_stars(0.2).empty());
    CHECK(significance_stars(0.05) == "·");
    CHECK(significance_stars(std::nan("")).empty());
    CHECK(format_fixed(2055.838) == "2,055.838");
    CHECK(format_fixed(-3.7674) == "-3.767");
    CHECK(format_fixed(-0.0004) == "0.000");
    CHECK(format_fixed(1234567.5, 1) == "1,234,567.5");
    CHECK(format_count(1325) == "1,325");
}

TEST_CASE("config validation") {
    const fs::path base = "/data";
    const std::string ok = R"({"outcome": {"file": "y.csv"}, "model": {"p": 1},
        "interventions": [{"date": "2017-12-18", "kind": "persistent", "label": "CME"}]})";
    const AnalysisConfig c = parse_analysis_config(ok, base);
    CHECK(c.outcome.file == fs::path("/data/y.csv"));
    CHECK(c.outcome.column == "value");
    CHECK(c.n_boot == 10000);
    CHECK(c.horizons == std::vector<int>{7});
    REQUIRE(c.interventions.size() == 1);
    CHECK(c.interventions[0].intervention.kind == InterventionKind::Persistent);

    const auto bad = [&](const std::string& text) {
        return code_of([&] { (void)parse_analysis_config(text, base); });
    };
    CHECK(bad("{") == ErrorCode::ConfigError);
    CHECK(bad(R"({"model": {"p": 1}})") == ErrorCode::ConfigError);
    CHECK(bad(R"({"outcome": {"file": "y.csv"}, "modle": {}})") == ErrorCode::ConfigError);
    CHECK(bad(R"({"outcome": {"file": "y.csv"}, "horizons": [0]})") == ErrorCode::ConfigError);
    CHECK(bad(R"({"outcome": {"file": "y.csv"},
        "interventions": [{"date": "2017-13-01", "kind": "pulse", "label": "x"}]})") == ErrorCode::ConfigError);
    CHECK(bad(R"({"outcome": {"file": "y.csv"},
        "covariates": [{"file": "x.csv", "column": "m1", "differencing": "d3"}]})") == ErrorCode::ConfigError);
}

TEST_CASE("structured errors and exit status") {
    TempDir tmp("err");
    CommandOptions o;
    o.config = tmp.path / "absent.json";
    std::ostringstream err;
    CHECK(run_command("analyze", o, err) != 0);
    const auto j = nlohmann::json::parse(err.str());
    CHECK(j["error"]["code"] == "IoError");
    CHECK(!j["error"]["message"].get<std::string>().empty());

    std::ostringstream err2;
    CHECK(run_command("bogus", o, err2) != 0);
}

TEST_CASE("analyze outputs") {
    TempDir tmp("analyze");
    CommandOptions o;
    o.config = quick_fixture(tmp.path / "fx", 7);
    o.out = tmp.path / "a";
    cmd_analyze(o);
    const std::string json_a = slurp(tmp.path / "a" / "report.json");
    const std::string txt = slurp(tmp.path / "a" / "report.txt");
    CHECK(txt.find("C-ARIMA estimates for gk_log") != std::string::npos);
    CHECK(txt.find("Note: ·p<0.1; *p<0.05; **p<0.01; ***p<0.001") != std::string::npos);

    SUBCASE("json round trip") {
        // the file ends with a newline after the document
        CHECK(nlohmann::ordered_json::parse(json_a).dump(2) + "\n" == json_a);
    }
    SUBCASE("second run is byte identical") {
        o.out = tmp.path / "b";
        cmd_analyze(o);
        CHECK(slurp(tmp.path / "b" / "report.json") == json_a);
        CHECK(slurp(tmp.path / "b" / "report.txt") == txt);
    }
    SUBCASE("seed override changes the bootstrap only") {
        o.out = tmp.path / "c";
        o.seed = 99;
        cmd_analyze(o);
        const auto a = nlohmann::json::parse(json_a);
        const auto c = nlohmann::json::parse(slurp(tmp.path / "c" / "report.json"));
        CHECK(c["seed"] == 99);
        const auto& ea = a["report"]["interventions"][5]["estimates"][0];
        const auto& ec = c["report"]["interventions"][5]["estimates"][0];
        CHECK(ea["value"] == ec["value"]);
        CHECK(ea["p_value_normal"] == ec["p_value_normal"]);
    }
    SUBCASE("counterfactual effect column") {
        const CsvTable t = read_csv(tmp.path / "a" / "counterfactual.csv");
        CHECK(t.header == std::vector<std::string>{"intervention", "date", "observed", "forecast", "lower95",
                                                   "upper95", "effect", "effect_lower95", "effect_upper95"});
        // 4 pulses with one day, CBOE with 7, CME with 21
        CHECK(t.rows.size() == 4 + 7 + 21);
        for (const auto& row : t.rows) {
            const double obs = std::stod(row[2]), fc = std::stod(row[3]), eff = std::stod(row[6]);
            CHECK(std::fabs(eff - (obs - fc)) <= 1e-12);
            CHECK(std::stod(row[4]) < fc);
            CHECK(std::stod(row[5]) > fc);
        }
    }
}

TEST_CASE("fit, diagnose and gk through a config") {
    TempDir tmp("fit");
    CommandOptions o;
    o.config = quick_fixture(tmp.path / "fx", 11);
    o.out = tmp.path / "o";
    cmd_fit(o);
    const auto fit = nlohmann::json::parse(slurp(tmp.path / "o" / "fit.json"));
    CHECK(fit.contains("candidates"));
    cmd_diagnose(o);
    const auto diag = nlohmann::json::parse(slurp(tmp.path / "o" / "diagnostics.json"));
    CHECK(diag["residuals"].contains("ljung_box"));
    CHECK(fs::exists(tmp.path / "o" / "qq.csv"));
    cmd_gk(o);
    const TimeSeries gk = ingest_series(tmp.path / "o" / "gk.csv", "gk");
    CHECK(gk.size() == fixture::kDays);
}

TEST_CASE("simulate command") {
    TempDir tmp("sim");
    put(tmp.path / "sim.json", R"({
      "model": {"p": 1},
      "truth": {"phi": [0.5], "sigma2": 1.0},
      "n": 200, "n_reps": 50, "seed": 3, "horizons": [1, 7],
      "effect": {"kind": "persistent", "magnitude": 1.0}
    })");
    CommandOptions o;
    o.config = tmp.path / "sim.json";
    o.out = tmp.path / "o";
    cmd_simulate(o);
    const CsvTable reps = read_csv(tmp.path / "o" / "reps.csv");
    CHECK(reps.rows.size() == 50);
    CHECK(reps.header.size() == 3 + 2 * 3 * 4 + 1);
    const auto summary = nlohmann::json::parse(slurp(tmp.path / "o" / "summary.json"));
    CHECK(summary["cells"].size() == 6);
}
