// Batch Monte Carlo execution and reporting. Replications run concurrently,
// each on its own derived random stream; aggregation happens single-threaded
// in replication order, so reports are byte-identical for any thread count.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "polya/config.hpp"
#include "polya/urn.hpp"

namespace polya {

struct BatchReport {
    nlohmann::json config;  // fully resolved experiment config
    ClassRReport class_r;
    ConditionReport conditions;
    std::vector<std::string> warnings;  // hypothesis violations and similar stamps

    std::vector<RunSummary> runs;

    // aggregates (all recomputable from `runs`)
    std::vector<double> dominance_frequency;  // per color
    double undominated_fraction = 0.0;
    double fixation_fraction = 0.0;
    std::optional<std::int64_t> fixation_onset_min;
    std::optional<std::int64_t> fixation_onset_median;
    std::optional<std::int64_t> fixation_onset_p90;
    double martingale_mean_sq = 0.0;
    double martingale_max_sq = 0.0;

    nlohmann::json to_json() const;
    static BatchReport from_json(const nlohmann::json& j);
};

struct BatchResult {
    BatchReport report;
    // per-replication thinned trajectories; filled only when requested
    std::vector<std::vector<TrajectoryPoint>> trajectories;
};

// Runs the full batch. thread_override > 0 pins the worker count; otherwise
// the POLYA_THREADS environment variable, then hardware concurrency, decides.
// A failing replication aborts the batch; the error names the replication
// index and its stream seed.
BatchResult run_batch(const ExperimentConfig& config, int thread_override = 0,
                      bool keep_trajectories = false);

// Serialization helpers shared by reports and the CLI.
nlohmann::json run_summary_to_json(const RunSummary& s);
RunSummary run_summary_from_json(const nlohmann::json& j);
nlohmann::json class_r_to_json(const ClassRReport& r);
ClassRReport class_r_from_json(const nlohmann::json& j);
nlohmann::json condition_report_to_json(const ConditionReport& r);
ConditionReport condition_report_from_json(const nlohmann::json& j);

// CSV: run_id, step, tau, theta_1..theta_d
void write_trajectories_csv(std::ostream& os,
                            const std::vector<std::vector<TrajectoryPoint>>& trajectories,
                            std::size_t d);
// CSV per-run summary table (empty fields for absent detections)
void write_runs_csv(std::ostream& os, const std::vector<RunSummary>& runs);

int resolve_thread_count(int thread_override, std::int64_t replications);

}  // namespace polya
