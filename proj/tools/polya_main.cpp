// polya: simulate, analyze and validate positively reinforced time-dependent
// urn processes driven by a JSON experiment config.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 runtime error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "polya/batch.hpp"
#include "polya/config.hpp"
#include "polya/meanfield.hpp"
#include "polya/rng.hpp"

namespace {

using nlohmann::json;

std::string resolve_out_path(const std::string& path) {
    if (path.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    if (const char* dir = std::getenv("POLYA_OUT_DIR")) {
        return (std::filesystem::path(dir) / p).string();
    }
    return path;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    const std::string resolved = resolve_out_path(path);
    std::ofstream out(resolved);
    if (!out) throw std::runtime_error("cannot open output file " + resolved);
    out << text;
}

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format;
    std::int64_t seed = -1;
    int threads = 0;
};

polya::ExperimentConfig load_config(const CommonOpts& opts) {
    polya::ExperimentConfig cfg = polya::ExperimentConfig::load(opts.config_path);
    if (opts.seed >= 0) cfg.master_seed = std::uint64_t(opts.seed);
    if (!opts.out_path.empty()) cfg.output.report_path = opts.out_path;
    if (!opts.format.empty()) cfg.output.format = opts.format;
    return cfg;
}

int cmd_simulate(const CommonOpts& opts) {
    polya::ExperimentConfig cfg = load_config(opts);
    const bool want_trajectories = !cfg.output.trajectories_path.empty();
    polya::BatchResult result = polya::run_batch(cfg, opts.threads, want_trajectories);
    for (const auto& w : result.report.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    if (cfg.output.format == "csv") {
        std::ostringstream os;
        polya::write_runs_csv(os, result.report.runs);
        write_text(cfg.output.report_path, os.str());
    } else {
        write_text(cfg.output.report_path, result.report.to_json().dump(2));
    }
    if (want_trajectories) {
        std::ostringstream os;
        polya::write_trajectories_csv(os, result.trajectories, cfg.d);
        write_text(cfg.output.trajectories_path, os.str());
    }
    return 0;
}

json stability_to_json(const polya::StabilityReport& rep) {
    json j;
    j["classification"] = polya::to_string(rep.classification);
    j["spectral_abscissa"] = rep.spectral_abscissa;
    j["eigenvalues_real"] = rep.eigen_real;
    j["eigenvalues_imag"] = rep.eigen_imag;
    j["at_equilibrium"] = rep.at_equilibrium;
    if (rep.at_equilibrium) {
        j["diagonal_check"] = {{"pass", rep.diagonal_check_pass},
                               {"computed", rep.diagonal_computed},
                               {"expected", rep.diagonal_expected}};
    }
    return j;
}

int cmd_analyze(const CommonOpts& opts, const std::string& flow_out_flag) {
    polya::ExperimentConfig cfg = load_config(opts);
    const polya::MeanFieldModel model(cfg.d, cfg.build_reinforcement());
    const std::string flow_out =
        !flow_out_flag.empty() ? flow_out_flag : cfg.output.trajectories_path;

    json out;
    out["config"] = cfg.to_json();
    out["class_r"] = polya::class_r_to_json(polya::validate_class_r(model.f));
    json eq_list = json::array();
    const auto points = polya::equilibria(model);
    for (const auto& p : points) {
        json e;
        json support = json::array();
        for (std::size_t i : p.support) support.push_back(i + 1);
        e["support"] = std::move(support);
        e["coordinates"] = p.coordinates;
        e["kind"] = p.trivial() ? "trivial" : "nontrivial";
        const auto h = polya::mean_field(model, p.coordinates);
        double h_inf = 0.0;
        for (double v : h) h_inf = std::max(h_inf, std::abs(v));
        e["h_inf_norm"] = h_inf;
        e["stability"] = stability_to_json(polya::jacobian_stability(model, p.coordinates));
        eq_list.push_back(std::move(e));
    }
    out["equilibria"] = std::move(eq_list);

    std::vector<std::vector<polya::TrajectoryPoint>> flow_rows;
    if (cfg.analysis.flow_starts > 0) {
        polya::FlowOptions fopts;
        fopts.dt = cfg.analysis.dt;
        fopts.T = cfg.analysis.T;
        polya::RngStream rng(polya::derive_stream_seed(cfg.analysis.flow_seed, 0));
        json flows = json::array();
        std::ostringstream csv;
        csv << "flow_id,t";
        for (std::size_t i = 1; i <= cfg.d; ++i) csv << ",y_" << i;
        csv << ",F\n";
        csv.precision(17);
        for (int k = 0; k < cfg.analysis.flow_starts; ++k) {
            std::vector<double> y0(cfg.d);
            double total = 0.0;
            for (auto& v : y0) {
                v = rng.exponential();
                total += v;
            }
            for (auto& v : y0) v /= total;
            const polya::FlowResult fr = polya::flow(model, y0, fopts);
            for (const auto& pt : fr.points) {
                csv << k << ',' << pt.t;
                for (double v : pt.y) csv << ',' << v;
                csv << ',' << pt.lyapunov << '\n';
            }
            json f;
            f["start"] = y0;
            f["end"] = fr.points.back().y;
            f["converged"] = fr.converged;
            f["final_h_inf"] = fr.final_h_inf;
            f["lyapunov_start"] = fr.points.front().lyapunov;
            f["lyapunov_end"] = fr.points.back().lyapunov;
            flows.push_back(std::move(f));
        }
        out["flows"] = std::move(flows);
        if (!flow_out.empty()) write_text(flow_out, csv.str());
    }

    write_text(cfg.output.report_path, out.dump(2));
    return 0;
}

int cmd_validate(const CommonOpts& opts) {
    polya::ExperimentConfig cfg = load_config(opts);
    const polya::Reinforcement f = cfg.build_reinforcement();
    const polya::Schedule schedule = cfg.build_schedule();
    const std::int64_t horizon = std::clamp<std::int64_t>(cfg.steps, 1000, 1000000);

    json out;
    out["config"] = cfg.to_json();
    out["class_r"] = polya::class_r_to_json(polya::validate_class_r(f));
    out["schedule_conditions"] =
        polya::condition_report_to_json(polya::check_conditions(schedule, horizon));
    write_text(cfg.output.report_path, out.dump(2));
    return 0;
}

int cmd_equilibria(std::size_t d, const std::string& format, const std::string& out_path) {
    // the equilibrium set does not depend on which class-R function is used
    const polya::MeanFieldModel model(d, polya::Reinforcement::power(2.0));
    const auto points = polya::equilibria(model);
    if (format == "json") {
        json out = json::array();
        for (const auto& p : points) {
            json support = json::array();
            for (std::size_t i : p.support) support.push_back(i + 1);
            out.push_back({{"support", std::move(support)},
                           {"coordinates", p.coordinates},
                           {"kind", p.trivial() ? "trivial" : "nontrivial"}});
        }
        write_text(out_path, out.dump(2));
    } else {
        std::ostringstream os;
        os << "support,kind";
        for (std::size_t i = 1; i <= d; ++i) os << ",y_" << i;
        os << '\n';
        for (const auto& p : points) {
            for (std::size_t k = 0; k < p.support.size(); ++k) {
                os << (k ? "|" : "") << p.support[k] + 1;
            }
            os << ',' << (p.trivial() ? "trivial" : "nontrivial");
            for (double v : p.coordinates) os << ',' << v;
            os << '\n';
        }
        write_text(out_path, os.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator and analyzer for positively reinforced time-dependent urn processes"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string flow_out;
    std::size_t eq_d = 2;
    std::string eq_format = "csv";
    std::string eq_out;

    auto add_common = [&](CLI::App* cmd, bool with_threads) {
        cmd->add_option("config", opts.config_path, "experiment config (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--seed", opts.seed, "override the master seed");
        cmd->add_option("--out", opts.out_path, "output path (default: config output.report, else stdout)");
        cmd->add_option("--format", opts.format, "report format: json | csv")
            ->check(CLI::IsMember({"json", "csv"}));
        if (with_threads) {
            cmd->add_option("--threads", opts.threads, "worker thread cap (default: POLYA_THREADS or all cores)");
        }
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run a Monte Carlo batch");
    add_common(simulate, true);

    CLI::App* analyze = app.add_subcommand("analyze", "equilibria, stability and ODE flows");
    add_common(analyze, false);
    analyze->add_option("--flow-out", flow_out, "write flow trajectories CSV here");

    CLI::App* validate = app.add_subcommand("validate", "class-R and schedule condition checks");
    add_common(validate, false);

    CLI::App* equilibria_cmd = app.add_subcommand("equilibria", "enumerate the 2^d - 1 equilibria");
    equilibria_cmd->add_option("--d", eq_d, "number of colors")->required();
    equilibria_cmd->add_option("--format", eq_format, "csv | json")
        ->check(CLI::IsMember({"json", "csv"}));
    equilibria_cmd->add_option("--out", eq_out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(opts);
        if (analyze->parsed()) return cmd_analyze(opts, flow_out);
        if (validate->parsed()) return cmd_validate(opts);
        if (equilibria_cmd->parsed()) return cmd_equilibria(eq_d, eq_format, eq_out);
    } catch (const polya::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
