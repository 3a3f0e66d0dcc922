#include "polya/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace polya {

using nlohmann::json;

namespace {

ConditionReport::Verdict verdict_from_string(const std::string& s) {
    if (s == "diverges") return ConditionReport::Verdict::diverges;
    if (s == "converges") return ConditionReport::Verdict::converges;
    return ConditionReport::Verdict::inconclusive;
}

// JSON cannot represent NaN or infinity; serialize those as null.
json finite_or_null(double v) {
    if (std::isfinite(v)) return json(v);
    return json(nullptr);
}

double finite_from_json(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

json check_result_to_json(const CheckResult& c) {
    return json{{"pass", c.pass}, {"worst_x", c.worst_x}, {"worst_value", finite_or_null(c.worst_value)}};
}

CheckResult check_result_from_json(const json& j) {
    CheckResult c;
    c.pass = j.at("pass").get<bool>();
    c.worst_x = j.at("worst_x").get<double>();
    c.worst_value = finite_from_json(j.at("worst_value"));
    return c;
}

std::int64_t percentile_nearest(const std::vector<std::int64_t>& sorted, double q) {
    const auto idx = std::size_t(std::llround(q * double(sorted.size() - 1)));
    return sorted[std::min(idx, sorted.size() - 1)];
}

}  // namespace

json class_r_to_json(const ClassRReport& r) {
    json j;
    j["cond_a"] = check_result_to_json(r.cond_a);
    j["cond_b"] = check_result_to_json(r.cond_b);
    j["cond_c"] = check_result_to_json(r.cond_c);
    j["alpha_inf"] = finite_or_null(r.alpha_inf);
    j["lemma_checks"] = {{"lipschitz", r.lemma_lipschitz},
                         {"zero_limit", r.lemma_zero_limit},
                         {"ratio_monotone", r.lemma_ratio_monotone},
                         {"power_bound", r.lemma_power_bound}};
    j["all_pass"] = r.all_pass();
    return j;
}

ClassRReport class_r_from_json(const json& j) {
    ClassRReport r;
    r.cond_a = check_result_from_json(j.at("cond_a"));
    r.cond_b = check_result_from_json(j.at("cond_b"));
    r.cond_c = check_result_from_json(j.at("cond_c"));
    r.alpha_inf = finite_from_json(j.at("alpha_inf"));
    const json& lemmas = j.at("lemma_checks");
    r.lemma_lipschitz = lemmas.at("lipschitz").get<bool>();
    r.lemma_zero_limit = lemmas.at("zero_limit").get<bool>();
    r.lemma_ratio_monotone = lemmas.at("ratio_monotone").get<bool>();
    r.lemma_power_bound = lemmas.at("power_bound").get<bool>();
    return r;
}

json condition_report_to_json(const ConditionReport& r) {
    json j;
    j["cond_i"] = to_string(r.cond_i);
    j["cond_ii"] = to_string(r.cond_ii);
    j["analytic"] = r.analytic;
    j["horizon"] = r.horizon;
    j["partial_sum_i"] = r.partial_sum_i;
    j["partial_sum_ii"] = r.partial_sum_ii;
    j["ratio_tail"] = r.ratio_tail;
    j["hypotheses_hold"] = r.hypotheses_hold();
    return j;
}

ConditionReport condition_report_from_json(const json& j) {
    ConditionReport r;
    r.cond_i = verdict_from_string(j.at("cond_i").get<std::string>());
    r.cond_ii = verdict_from_string(j.at("cond_ii").get<std::string>());
    r.analytic = j.at("analytic").get<bool>();
    r.horizon = j.at("horizon").get<std::int64_t>();
    r.partial_sum_i = j.at("partial_sum_i").get<double>();
    r.partial_sum_ii = j.at("partial_sum_ii").get<double>();
    r.ratio_tail = j.at("ratio_tail").get<double>();
    return r;
}

json run_summary_to_json(const RunSummary& s) {
    json j;
    j["replication"] = s.replication;
    j["master_seed"] = s.master_seed;
    j["stream_seed"] = s.stream_seed;
    j["steps"] = s.steps;
    j["final_tau"] = s.final_tau;
    j["final_theta"] = s.final_theta;
    j["dominance_margin"] = s.dominance_margin;
    // colors are reported 1-based, matching the theta_1..theta_d CSV columns
    j["dominant_color"] = s.dominant_color ? json(*s.dominant_color + 1) : json(nullptr);
    if (s.fixation) {
        j["fixation"] = {{"color", s.fixation->color + 1}, {"onset_step", s.fixation->onset_step}};
    } else {
        j["fixation"] = nullptr;
    }
    j["fixation_window"] = s.fixation_window;
    j["martingale_sq_norm"] = s.martingale_sq_norm;
    return j;
}

RunSummary run_summary_from_json(const json& j) {
    RunSummary s;
    s.replication = j.at("replication").get<std::uint64_t>();
    s.master_seed = j.at("master_seed").get<std::uint64_t>();
    s.stream_seed = j.at("stream_seed").get<std::uint64_t>();
    s.steps = j.at("steps").get<std::int64_t>();
    s.final_tau = j.at("final_tau").get<double>();
    s.final_theta = j.at("final_theta").get<std::vector<double>>();
    s.dominance_margin = j.at("dominance_margin").get<double>();
    if (!j.at("dominant_color").is_null()) {
        s.dominant_color = j.at("dominant_color").get<std::size_t>() - 1;
    }
    if (!j.at("fixation").is_null()) {
        FixationResult f;
        f.color = j.at("fixation").at("color").get<std::size_t>() - 1;
        f.onset_step = j.at("fixation").at("onset_step").get<std::int64_t>();
        s.fixation = f;
    }
    s.fixation_window = j.at("fixation_window").get<std::uint64_t>();
    s.martingale_sq_norm = j.at("martingale_sq_norm").get<double>();
    return s;
}

json BatchReport::to_json() const {
    json j;
    j["config"] = config;
    j["class_r"] = class_r_to_json(class_r);
    j["schedule_conditions"] = condition_report_to_json(conditions);
    j["warnings"] = warnings;
    json runs_json = json::array();
    for (const auto& r : runs) runs_json.push_back(run_summary_to_json(r));
    j["runs"] = std::move(runs_json);
    j["aggregates"] = {
        {"dominance_frequency", dominance_frequency},
        {"undominated_fraction", undominated_fraction},
        {"fixation_fraction", fixation_fraction},
        {"fixation_onset_min", fixation_onset_min ? json(*fixation_onset_min) : json(nullptr)},
        {"fixation_onset_median",
         fixation_onset_median ? json(*fixation_onset_median) : json(nullptr)},
        {"fixation_onset_p90", fixation_onset_p90 ? json(*fixation_onset_p90) : json(nullptr)},
        {"martingale_mean_sq", martingale_mean_sq},
        {"martingale_max_sq", martingale_max_sq},
    };
    return j;
}

BatchReport BatchReport::from_json(const json& j) {
    BatchReport r;
    r.config = j.at("config");
    r.class_r = class_r_from_json(j.at("class_r"));
    r.conditions = condition_report_from_json(j.at("schedule_conditions"));
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& run : j.at("runs")) r.runs.push_back(run_summary_from_json(run));
    const json& agg = j.at("aggregates");
    r.dominance_frequency = agg.at("dominance_frequency").get<std::vector<double>>();
    r.undominated_fraction = agg.at("undominated_fraction").get<double>();
    r.fixation_fraction = agg.at("fixation_fraction").get<double>();
    if (!agg.at("fixation_onset_min").is_null()) {
        r.fixation_onset_min = agg.at("fixation_onset_min").get<std::int64_t>();
    }
    if (!agg.at("fixation_onset_median").is_null()) {
        r.fixation_onset_median = agg.at("fixation_onset_median").get<std::int64_t>();
    }
    if (!agg.at("fixation_onset_p90").is_null()) {
        r.fixation_onset_p90 = agg.at("fixation_onset_p90").get<std::int64_t>();
    }
    r.martingale_mean_sq = agg.at("martingale_mean_sq").get<double>();
    r.martingale_max_sq = agg.at("martingale_max_sq").get<double>();
    return r;
}

int resolve_thread_count(int thread_override, std::int64_t replications) {
    int n = thread_override;
    if (n <= 0) {
        if (const char* env = std::getenv("POLYA_THREADS")) {
            n = std::atoi(env);
        }
    }
    if (n <= 0) n = int(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    return int(std::min<std::int64_t>(n, std::max<std::int64_t>(1, replications)));
}

BatchResult run_batch(const ExperimentConfig& config, int thread_override,
                      bool keep_trajectories) {
    const Reinforcement f = config.build_reinforcement();
    const Schedule schedule = config.build_schedule();
    const std::int64_t R = config.replications;

    BatchResult result;
    BatchReport& report = result.report;
    report.config = config.to_json();

    report.class_r = validate_class_r(f);
    const std::int64_t horizon =
        std::clamp<std::int64_t>(config.steps, 1000, 1000000);
    report.conditions = check_conditions(schedule, horizon);

    if (!report.class_r.cond_a.pass) {
        report.warnings.push_back("reinforcement violates condition (A): "
                                  "not strictly increasing with f(0)=0, f(1)=1");
    }
    if (!report.class_r.cond_b.pass) {
        report.warnings.push_back("reinforcement violates condition (B): "
                                  "derivative not finite on (0,1) or at the boundary");
    }
    if (!report.class_r.cond_c.pass) {
        std::ostringstream os;
        os << "reinforcement violates condition (C): alpha_inf = " << report.class_r.alpha_inf
           << " is not > 1";
        report.warnings.push_back(os.str());
    }
    if (report.conditions.cond_i != ConditionReport::Verdict::diverges) {
        std::ostringstream os;
        os << "schedule condition (i) " << to_string(report.conditions.cond_i)
           << ": sum sigma_n/tau_n must diverge";
        report.warnings.push_back(os.str());
    }
    if (report.conditions.cond_ii != ConditionReport::Verdict::converges) {
        std::ostringstream os;
        os << "schedule condition (ii) " << to_string(report.conditions.cond_ii)
           << ": sum (sigma_n/tau_n)^2 must converge";
        report.warnings.push_back(os.str());
    }

    RunOptions options;
    options.steps = config.steps;
    options.snapshots = config.thinning;
    options.detectors.dominance_epsilon = config.dominance_epsilon;
    options.detectors.fixation_window = config.fixation_window;
    options.detectors.martingale_eta = config.martingale_eta;
    options.master_seed = config.master_seed;
    options.allow_dead_colors = config.allow_dead_colors;

    report.runs.resize(std::size_t(R));
    if (keep_trajectories) result.trajectories.resize(std::size_t(R));

    const int n_threads = resolve_thread_count(thread_override, R);
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::string error_message;

    auto worker = [&]() {
        for (;;) {
            const std::int64_t rep = next.fetch_add(1);
            if (rep >= R || failed.load()) return;
            RunOptions opt = options;
            opt.replication = std::uint64_t(rep);
            try {
                RunResult run = run_urn(config.initial_composition, f, schedule, opt);
                report.runs[std::size_t(rep)] = std::move(run.summary);
                if (keep_trajectories) {
                    result.trajectories[std::size_t(rep)] = std::move(run.trajectory);
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) {
                    std::ostringstream os;
                    os << "replication " << rep << " (stream seed "
                       << derive_stream_seed(config.master_seed, std::uint64_t(rep))
                       << ") failed: " << e.what();
                    error_message = os.str();
                }
                return;
            }
        }
    };

    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(std::size_t(n_threads));
        for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (failed.load()) throw std::runtime_error(error_message);

    // aggregation, in replication order
    report.dominance_frequency.assign(config.d, 0.0);
    std::vector<std::int64_t> onsets;
    double mean_sq = 0.0, max_sq = 0.0;
    std::int64_t undominated = 0, fixated = 0;
    for (const auto& run : report.runs) {
        if (run.dominant_color) {
            report.dominance_frequency[*run.dominant_color] += 1.0;
        } else {
            ++undominated;
        }
        if (run.fixation) {
            ++fixated;
            onsets.push_back(run.fixation->onset_step);
        }
        mean_sq += run.martingale_sq_norm;
        max_sq = std::max(max_sq, run.martingale_sq_norm);
    }
    for (double& v : report.dominance_frequency) v /= double(R);
    report.undominated_fraction = double(undominated) / double(R);
    report.fixation_fraction = double(fixated) / double(R);
    if (!onsets.empty()) {
        std::sort(onsets.begin(), onsets.end());
        report.fixation_onset_min = onsets.front();
        report.fixation_onset_median = percentile_nearest(onsets, 0.5);
        report.fixation_onset_p90 = percentile_nearest(onsets, 0.9);
    }
    report.martingale_mean_sq = mean_sq / double(R);
    report.martingale_max_sq = max_sq;
    return result;
}

void write_trajectories_csv(std::ostream& os,
                            const std::vector<std::vector<TrajectoryPoint>>& trajectories,
                            std::size_t d) {
    os << "run_id,step,tau";
    for (std::size_t i = 1; i <= d; ++i) os << ",theta_" << i;
    os << '\n';
    os.precision(17);
    for (std::size_t run = 0; run < trajectories.size(); ++run) {
        for (const auto& pt : trajectories[run]) {
            os << run << ',' << pt.step << ',' << pt.tau;
            for (double v : pt.theta) os << ',' << v;
            os << '\n';
        }
    }
}

void write_runs_csv(std::ostream& os, const std::vector<RunSummary>& runs) {
    os << "run_id,dominant_color,dominance_margin,fixation_color,fixation_onset,"
          "martingale_sq_norm\n";
    os.precision(17);
    for (const auto& run : runs) {
        os << run.replication << ',';
        if (run.dominant_color) os << *run.dominant_color + 1;
        os << ',' << run.dominance_margin << ',';
        if (run.fixation) os << run.fixation->color + 1;
        os << ',';
        if (run.fixation) os << run.fixation->onset_step;
        os << ',' << run.martingale_sq_norm << '\n';
    }
}

}  // namespace polya
