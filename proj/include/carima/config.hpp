#pragma once

#include "carima/causal.hpp"
#include "carima/sarima.hpp"
#include "carima/simulate.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace carima {

enum class Transform { None, Log };

struct OutcomeConfig {
    std::filesystem::path file;
    std::string column = "value";
    Transform transform = Transform::None;
    bool ohlc_to_gk = false;
};

struct CovariateConfig {
    std::filesystem::path file;
    std::string column;
    std::string name;          // regressor name, defaults to column
    int differencing = 0;      // 0, 1 or 2 first differences
};

/// An explicit order, or a grid of orders up to the *_max bounds.
struct ModelConfig {
    ModelSpec base;
    bool grid = false;
    int p_max = 0, q_max = 0, P_max = 0, Q_max = 0;

    [[nodiscard]] std::vector<ModelSpec> candidates() const;
};

struct InterventionConfig {
    Intervention intervention;
    std::vector<int> horizons;     // empty means the global list
};

struct MediatorConfig {
    std::filesystem::path file;
    std::string column;
    std::string name;              // prefix of the lag columns, defaults to column
    Transform transform = Transform::None;
    ModelConfig model;
    int lags = 3;
};

struct AnalysisConfig {
    OutcomeConfig outcome;
    std::vector<CovariateConfig> covariates;
    ModelConfig model;
    std::vector<InterventionConfig> interventions;
    std::vector<int> horizons{7};
    std::vector<double> b{1.0};
    int n_boot = 10'000;
    std::uint64_t seed = 20171218;
    bool bootstrap_bands = false;
    std::size_t min_pre_observations = 30;
    std::filesystem::path output_dir = "carima_out";
    std::optional<MediatorConfig> mediator;
};

struct SimulationJob {
    SimulationConfig config;
    std::filesystem::path output_dir = "carima_out";
};

/// Relative paths are resolved against `base_dir`.
/// Throws Error(ConfigError) describing the offending key.
[[nodiscard]] AnalysisConfig parse_analysis_config(const std::string& json_text,
                                                   const std::filesystem::path& base_dir);
[[nodiscard]] AnalysisConfig load_analysis_config(const std::filesystem::path& path);

[[nodiscard]] SimulationJob parse_simulation_config(const std::string& json_text,
                                                    const std::filesystem::path& base_dir);
[[nodiscard]] SimulationJob load_simulation_config(const std::filesystem::path& path);

}  // namespace carima
