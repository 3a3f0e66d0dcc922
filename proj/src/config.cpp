#include "polya/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace polya {

using nlohmann::json;

namespace {

const json& require_field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(path + "." + key, "missing required field");
    return *it;
}

double require_number(const json& j, const char* key, const std::string& path) {
    const json& v = require_field(j, key, path);
    if (!v.is_number()) throw ConfigError(path + "." + key, "expected a number");
    return v.get<double>();
}

double optional_number(const json& j, const char* key, const std::string& path, double fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(path + "." + key, "expected a number");
    return v.get<double>();
}

std::int64_t optional_integer(const json& j, const char* key, const std::string& path,
                              std::int64_t fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(path + "." + key, "expected an integer");
    return v.get<std::int64_t>();
}

bool optional_bool(const json& j, const char* key, const std::string& path, bool fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_boolean()) throw ConfigError(path + "." + key, "expected a boolean");
    return v.get<bool>();
}

std::string optional_string(const json& j, const char* key, const std::string& path,
                            const std::string& fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_string()) throw ConfigError(path + "." + key, "expected a string");
    return v.get<std::string>();
}

}  // namespace

Reinforcement ReinforcementConfig::build() const {
    switch (family) {
        case ReinforcementFamily::power:
            return Reinforcement::power(exponent);
        case ReinforcementFamily::power_exp:
            return Reinforcement::power_exp(epsilon);
        case ReinforcementFamily::tabulated:
            return Reinforcement::tabulated(points, mode, fd_step);
    }
    return Reinforcement::power(exponent);
}

json ReinforcementConfig::to_json() const {
    json j;
    switch (family) {
        case ReinforcementFamily::power:
            j["family"] = "power";
            j["exponent"] = exponent;
            break;
        case ReinforcementFamily::power_exp:
            j["family"] = "power_exp";
            j["epsilon"] = epsilon;
            break;
        case ReinforcementFamily::tabulated: {
            j["family"] = "tabulated";
            json pts = json::array();
            for (const auto& [x, y] : points) pts.push_back(json::array({x, y}));
            j["points"] = std::move(pts);
            j["derivative_mode"] =
                mode == DerivativeMode::analytic ? "analytic" : "central_difference";
            j["fd_step"] = fd_step;
            break;
        }
    }
    return j;
}

ReinforcementConfig ReinforcementConfig::from_json(const json& j, const std::string& path) {
    ReinforcementConfig cfg;
    const json& fam = require_field(j, "family", path);
    if (!fam.is_string()) throw ConfigError(path + ".family", "expected a string");
    const std::string name = fam.get<std::string>();
    if (name == "power") {
        cfg.family = ReinforcementFamily::power;
        cfg.exponent = require_number(j, "exponent", path);
        if (!(cfg.exponent > 0.0)) throw ConfigError(path + ".exponent", "must be > 0");
        cfg.mode = DerivativeMode::analytic;
    } else if (name == "power_exp") {
        cfg.family = ReinforcementFamily::power_exp;
        cfg.epsilon = require_number(j, "epsilon", path);
        if (!(cfg.epsilon > 0.0)) throw ConfigError(path + ".epsilon", "must be > 0");
        cfg.mode = DerivativeMode::analytic;
    } else if (name == "tabulated") {
        cfg.family = ReinforcementFamily::tabulated;
        const json& pts = require_field(j, "points", path);
        if (!pts.is_array() || pts.size() < 2) {
            throw ConfigError(path + ".points", "expected an array of at least 2 [x, f] pairs");
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const json& p = pts[i];
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
                std::ostringstream os;
                os << path << ".points[" << i << "]";
                throw ConfigError(os.str(), "expected an [x, f] number pair");
            }
            cfg.points.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
        const std::string mode = optional_string(j, "derivative_mode", path, "central_difference");
        if (mode == "analytic") {
            cfg.mode = DerivativeMode::analytic;
        } else if (mode == "central_difference") {
            cfg.mode = DerivativeMode::central_difference;
        } else {
            throw ConfigError(path + ".derivative_mode",
                              "expected \"analytic\" or \"central_difference\"");
        }
        cfg.fd_step = optional_number(j, "fd_step", path, 1e-6);
        if (!(cfg.fd_step > 0.0 && cfg.fd_step < 0.25)) {
            throw ConfigError(path + ".fd_step", "must lie in (0, 0.25)");
        }
    } else {
        throw ConfigError(path + ".family",
                          "unknown family \"" + name + "\" (power | power_exp | tabulated)");
    }
    try {
        cfg.build();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
    return cfg;
}

Schedule ScheduleConfig::build(double tau0) const {
    switch (family) {
        case ScheduleFamily::constant:
            return Schedule::constant(c, tau0);
        case ScheduleFamily::polynomial:
            return Schedule::polynomial(p, tau0);
        case ScheduleFamily::explicit_list:
            return Schedule::explicit_values(values, tau0, on_exhaust);
    }
    return Schedule::constant(c, tau0);
}

json ScheduleConfig::to_json() const {
    json j;
    switch (family) {
        case ScheduleFamily::constant:
            j["family"] = "constant";
            j["c"] = c;
            break;
        case ScheduleFamily::polynomial:
            j["family"] = "polynomial";
            j["p"] = p;
            break;
        case ScheduleFamily::explicit_list:
            j["family"] = "explicit";
            j["values"] = values;
            j["on_exhaust"] = on_exhaust == OnExhaust::cycle ? "cycle" : "error";
            break;
    }
    return j;
}

ScheduleConfig ScheduleConfig::from_json(const json& j, const std::string& path) {
    ScheduleConfig cfg;
    const json& fam = require_field(j, "family", path);
    if (!fam.is_string()) throw ConfigError(path + ".family", "expected a string");
    const std::string name = fam.get<std::string>();
    if (name == "constant") {
        cfg.family = ScheduleFamily::constant;
        const std::int64_t c = optional_integer(j, "c", path, -1);
        if (c < 1) throw ConfigError(path + ".c", "expected an integer >= 1");
        cfg.c = std::uint64_t(c);
    } else if (name == "polynomial") {
        cfg.family = ScheduleFamily::polynomial;
        cfg.p = require_number(j, "p", path);
        if (!(cfg.p >= 0.0)) throw ConfigError(path + ".p", "must be >= 0");
    } else if (name == "explicit") {
        cfg.family = ScheduleFamily::explicit_list;
        const json& vals = require_field(j, "values", path);
        if (!vals.is_array() || vals.empty()) {
            throw ConfigError(path + ".values", "expected a non-empty array of integers >= 1");
        }
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (!vals[i].is_number_integer() || vals[i].get<std::int64_t>() < 1) {
                std::ostringstream os;
                os << path << ".values[" << i << "]";
                throw ConfigError(os.str(), "expected an integer >= 1");
            }
            cfg.values.push_back(vals[i].get<std::uint64_t>());
        }
        const std::string mode = optional_string(j, "on_exhaust", path, "cycle");
        if (mode == "cycle") {
            cfg.on_exhaust = OnExhaust::cycle;
        } else if (mode == "error") {
            cfg.on_exhaust = OnExhaust::error;
        } else {
            throw ConfigError(path + ".on_exhaust", "expected \"cycle\" or \"error\"");
        }
    } else {
        throw ConfigError(path + ".family",
                          "unknown family \"" + name + "\" (constant | polynomial | explicit)");
    }
    return cfg;
}

double ExperimentConfig::tau0() const {
    double total = 0.0;
    for (double v : initial_composition) total += v;
    return total;
}

json ExperimentConfig::to_json() const {
    json j;
    j["schema_version"] = schema_version;
    j["d"] = d;
    j["initial_composition"] = initial_composition;
    j["reinforcement"] = reinforcement.to_json();
    j["schedule"] = schedule.to_json();
    j["steps"] = steps;
    j["replications"] = replications;
    j["master_seed"] = master_seed;
    j["thinning"] = thinning;
    j["dominance_epsilon"] = dominance_epsilon;
    j["fixation_window"] = fixation_window;
    j["martingale_eta"] = martingale_eta;
    j["allow_dead_colors"] = allow_dead_colors;
    j["output"] = {{"report", output.report_path},
                   {"format", output.format},
                   {"trajectories", output.trajectories_path}};
    j["analysis"] = {{"flow_starts", analysis.flow_starts},
                     {"flow_seed", analysis.flow_seed},
                     {"dt", analysis.dt},
                     {"T", analysis.T}};
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    const std::string root = "$";
    if (!j.is_object()) throw ConfigError(root, "expected a JSON object");
    ExperimentConfig cfg;
    cfg.schema_version = int(optional_integer(j, "schema_version", root, 1));
    if (cfg.schema_version != 1) {
        throw ConfigError(root + ".schema_version", "unsupported schema version");
    }

    const std::int64_t d = optional_integer(j, "d", root, -1);
    if (d < 2) throw ConfigError(root + ".d", "expected an integer >= 2");
    cfg.d = std::size_t(d);

    const json& u0 = require_field(j, "initial_composition", root);
    if (!u0.is_array()) throw ConfigError(root + ".initial_composition", "expected an array");
    if (u0.size() != cfg.d) {
        std::ostringstream os;
        os << "expected " << cfg.d << " entries, got " << u0.size();
        throw ConfigError(root + ".initial_composition", os.str());
    }
    for (std::size_t i = 0; i < u0.size(); ++i) {
        if (!u0[i].is_number()) {
            std::ostringstream os;
            os << root << ".initial_composition[" << i << "]";
            throw ConfigError(os.str(), "expected a number");
        }
        cfg.initial_composition.push_back(u0[i].get<double>());
    }
    cfg.allow_dead_colors = optional_bool(j, "allow_dead_colors", root, false);
    for (std::size_t i = 0; i < cfg.initial_composition.size(); ++i) {
        const double v = cfg.initial_composition[i];
        if (!std::isfinite(v) || v < 0.0 || (v == 0.0 && !cfg.allow_dead_colors)) {
            std::ostringstream os;
            os << root << ".initial_composition[" << i << "]";
            throw ConfigError(os.str(), cfg.allow_dead_colors
                                            ? "must be a finite number >= 0"
                                            : "must be > 0 (or set allow_dead_colors)");
        }
    }
    if (!(cfg.tau0() > 0.0)) {
        throw ConfigError(root + ".initial_composition", "must have positive total mass");
    }

    cfg.reinforcement =
        ReinforcementConfig::from_json(require_field(j, "reinforcement", root), root + ".reinforcement");
    cfg.schedule = ScheduleConfig::from_json(require_field(j, "schedule", root), root + ".schedule");

    cfg.steps = optional_integer(j, "steps", root, 0);
    if (cfg.steps < 0) throw ConfigError(root + ".steps", "must be >= 0");
    cfg.replications = optional_integer(j, "replications", root, 1);
    if (cfg.replications < 1) throw ConfigError(root + ".replications", "must be >= 1");
    const std::int64_t seed = optional_integer(j, "master_seed", root, 1);
    cfg.master_seed = std::uint64_t(seed);
    cfg.thinning = int(optional_integer(j, "thinning", root, 512));
    if (cfg.thinning < 2) throw ConfigError(root + ".thinning", "must be >= 2");
    cfg.dominance_epsilon = optional_number(j, "dominance_epsilon", root, 0.05);
    if (!(cfg.dominance_epsilon > 0.0 && cfg.dominance_epsilon < 1.0)) {
        throw ConfigError(root + ".dominance_epsilon", "must lie in (0, 1)");
    }
    const std::int64_t window = optional_integer(j, "fixation_window", root, 10000);
    if (window < 0) throw ConfigError(root + ".fixation_window", "must be >= 0");
    cfg.fixation_window = std::uint64_t(window);
    cfg.martingale_eta = optional_integer(j, "martingale_eta", root, 0);
    if (cfg.martingale_eta < 0) throw ConfigError(root + ".martingale_eta", "must be >= 0");

    if (cfg.schedule.family == ScheduleFamily::explicit_list &&
        cfg.schedule.on_exhaust == OnExhaust::error &&
        cfg.steps > std::int64_t(cfg.schedule.values.size())) {
        std::ostringstream os;
        os << "steps (" << cfg.steps << ") exceeds the explicit schedule length ("
           << cfg.schedule.values.size() << ") with on_exhaust=error";
        throw ConfigError(root + ".steps", os.str());
    }

    if (j.contains("output")) {
        const json& out = j.at("output");
        const std::string path = root + ".output";
        cfg.output.report_path = optional_string(out, "report", path, "");
        cfg.output.format = optional_string(out, "format", path, "json");
        if (cfg.output.format != "json" && cfg.output.format != "csv") {
            throw ConfigError(path + ".format", "expected \"json\" or \"csv\"");
        }
        cfg.output.trajectories_path = optional_string(out, "trajectories", path, "");
    }
    if (j.contains("analysis")) {
        const json& an = j.at("analysis");
        const std::string path = root + ".analysis";
        cfg.analysis.flow_starts = int(optional_integer(an, "flow_starts", path, 0));
        if (cfg.analysis.flow_starts < 0) throw ConfigError(path + ".flow_starts", "must be >= 0");
        cfg.analysis.flow_seed = std::uint64_t(optional_integer(an, "flow_seed", path, 1));
        cfg.analysis.dt = optional_number(an, "dt", path, 0.01);
        if (!(cfg.analysis.dt > 0.0)) throw ConfigError(path + ".dt", "must be > 0");
        cfg.analysis.T = optional_number(an, "T", path, 200.0);
        if (!(cfg.analysis.T > 0.0)) throw ConfigError(path + ".T", "must be > 0");
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& file_path) {
    std::ifstream in(file_path);
    if (!in) throw ConfigError("$", "cannot open config file " + file_path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("$", std::string("invalid JSON: ") + e.what());
    }
    return from_json(j);
}

}  // namespace polya
