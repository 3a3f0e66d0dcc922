// Experiment configuration: a single versioned JSON document describing the
// urn, the reinforcement, the schedule, the detectors and the outputs.
// Validation errors carry the JSON path of the offending field.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "polya/reinforcement.hpp"
#include "polya/schedule.hpp"

namespace polya {

class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& path, const std::string& message)
        : std::invalid_argument("config error at " + path + ": " + message), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct ReinforcementConfig {
    ReinforcementFamily family = ReinforcementFamily::power;
    double exponent = 2.0;  // power
    double epsilon = 0.1;   // power_exp
    std::vector<std::pair<double, double>> points;  // tabulated
    DerivativeMode mode = DerivativeMode::analytic;
    double fd_step = 1e-6;  // tabulated, central_difference mode

    Reinforcement build() const;
    nlohmann::json to_json() const;
    static ReinforcementConfig from_json(const nlohmann::json& j, const std::string& path);
};

struct ScheduleConfig {
    ScheduleFamily family = ScheduleFamily::constant;
    std::uint64_t c = 1;     // constant
    double p = 1.0;          // polynomial
    std::vector<std::uint64_t> values;  // explicit
    OnExhaust on_exhaust = OnExhaust::cycle;

    Schedule build(double tau0) const;
    nlohmann::json to_json() const;
    static ScheduleConfig from_json(const nlohmann::json& j, const std::string& path);
};

struct OutputConfig {
    std::string report_path;        // empty: stdout
    std::string format = "json";    // "json" | "csv"
    std::string trajectories_path;  // empty: no trajectory CSV
};

struct AnalysisConfig {
    int flow_starts = 0;  // number of random simplex starts to integrate
    std::uint64_t flow_seed = 1;
    double dt = 0.01;
    double T = 200.0;
};

struct ExperimentConfig {
    int schema_version = 1;
    std::size_t d = 2;
    std::vector<double> initial_composition;
    ReinforcementConfig reinforcement;
    ScheduleConfig schedule;
    std::int64_t steps = 0;
    std::int64_t replications = 1;
    std::uint64_t master_seed = 1;
    int thinning = 512;
    double dominance_epsilon = 0.05;
    std::uint64_t fixation_window = 10000;
    std::int64_t martingale_eta = 0;
    bool allow_dead_colors = false;
    OutputConfig output;
    AnalysisConfig analysis;

    double tau0() const;
    Reinforcement build_reinforcement() const { return reinforcement.build(); }
    Schedule build_schedule() const { return schedule.build(tau0()); }

    // full resolved config (defaults filled in), embedded in every report
    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& file_path);
};

}  // namespace polya
