#pragma once

// JSON scenario configuration. Keys match the parameter struct fields:
//
//   {
//     "model": "four_level" | "five_level" | "two_ion",
//     "params": { "nu_omega1": 2, ..., "nu_trap": 20 },
//     "initial_state": "1", "t_end": 1.0, "sample_dt": 0.001,
//     "micromotion_map": true, "monitored": ["1", "3"],
//     "rel_tol": 1e-10, "abs_tol": 1e-12, "max_step_fraction": 0.025,
//     "scan": { "nu_delta2_min": -10, "nu_delta2_max": 10, "points": 201, "t_obs": 0.5 },
//     "scaling": { "nu_trap_list": [40, 80, 160, 320] }
//   }
//
// Every leaf can be overridden with key=value, where key is a dotted path
// ("params.nu_quad") or a bare leaf name ("nu_quad") that is unique across the
// top level, "params", "scan" and "scaling".

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "quadfold/errors.hpp"
#include "quadfold/experiments.hpp"
#include "quadfold/models.hpp"

namespace quadfold {

using Json = nlohmann::ordered_json;

struct ScanSpec {
    double nu_delta2_min = -10.0;
    double nu_delta2_max = 10.0;
    int points = 201;
    double t_obs = 0.5;

    std::vector<double> grid() const { return linspace(nu_delta2_min, nu_delta2_max, points); }
};

struct RunSpec {
    ScenarioConfig scenario;
    ScanSpec scan;
    std::vector<double> nu_trap_list{40, 80, 160, 320};
};

// ---------------------------------------------------------------------------
// Parameters

inline Json params_to_json(const ModelParams& p)
{
    const FourLevelParams& b = base_params(p);
    Json j;
    j["nu_omega1"] = b.nu_omega1;
    j["nu_omega2"] = b.nu_omega2;
    j["nu_delta2"] = b.nu_delta2;
    j["nu_delta3"] = b.nu_delta3;
    j["nu_delta4"] = b.nu_delta4;
    j["nu_quad"] = b.nu_quad;
    j["nu_trap"] = b.nu_trap;
    if (const auto* f = std::get_if<FiveLevelParams>(&p)) {
        j["nu_delta5"] = f->nu_delta5;
        j["nu_quad_bar"] = f->nu_quad_bar;
    }
    if (const auto* t = std::get_if<TwoIonParams>(&p)) j["nu_lambda"] = t->nu_lambda;
    return j;
}

/// Same keys with the nu_ prefix dropped, values in rad/us.
inline Json params_to_angular_json(const ModelParams& p)
{
    const Json nu = params_to_json(p);
    Json out;
    for (const auto& [key, value] : nu.items())
        out[key.substr(3)] = to_angular(value.get<double>());
    return out;
}

inline ModelParams params_from_json(const std::string& model, const Json& j)
{
    if (!j.is_object()) throw ConfigError("'params' must be an object");
    std::set<std::string> allowed{"nu_omega1", "nu_omega2", "nu_delta2", "nu_delta3", "nu_delta4", "nu_quad", "nu_trap"};
    if (model == "five_level") allowed.insert({"nu_delta5", "nu_quad_bar"});
    else if (model == "two_ion") allowed.insert("nu_lambda");
    else if (model != "four_level") throw ConfigError("unknown model '" + model + "'");

    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown parameter '" + key + "' for model " + model);
        if (!value.is_number()) throw ConfigError("parameter '" + key + "' must be a number");
    }
    if (!j.contains("nu_trap")) throw ConfigError("parameter 'nu_trap' is required");
    const auto get = [&](const char* key) { return j.contains(key) ? j.at(key).get<double>() : 0.0; };

    FourLevelParams b{get("nu_omega1"), get("nu_omega2"), get("nu_delta2"), get("nu_delta3"),
                      get("nu_delta4"), get("nu_quad"), get("nu_trap")};
    ModelParams out = b;
    if (model == "five_level") out = FiveLevelParams{b, get("nu_delta5"), get("nu_quad_bar")};
    if (model == "two_ion") out = TwoIonParams{b, get("nu_lambda")};
    try {
        std::visit([](const auto& p) { p.validate(); }, out);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return out;
}

/// Closed-form effective parameters in MHz.
inline Json effective_params_json(const ModelParams& p)
{
    Json j;
    if (const auto* f = std::get_if<FourLevelParams>(&p)) {
        const auto e = four_level_effective(*f);
        j["rabi_scale"] = e.rabi_scale;
        j["nu_omega1"] = e.nu_omega1;
        j["nu_omega2"] = e.nu_omega2;
        j["nu_delta2"] = e.nu_delta2;
        j["nu_delta3"] = e.nu_delta3;
        j["nu_delta4"] = e.nu_delta4;
    } else if (const auto* v = std::get_if<FiveLevelParams>(&p)) {
        const auto e = five_level_effective(*v);
        j["nu_omega1"] = e.nu_omega1;
        j["nu_omega2"] = e.nu_omega2;
        j["nu_omega3"] = e.nu_omega3;
        j["nu_delta2"] = e.nu_delta2;
        j["nu_delta3"] = e.nu_delta3;
        j["nu_delta4"] = e.nu_delta4;
        j["nu_delta5"] = e.nu_delta5;
    } else {
        const auto e = two_ion_effective(std::get<TwoIonParams>(p));
        j["rabi_scale"] = e.single.rabi_scale;
        j["nu_omega1"] = e.single.nu_omega1;
        j["nu_omega2"] = e.single.nu_omega2;
        j["nu_delta2"] = e.single.nu_delta2;
        j["nu_delta3"] = e.single.nu_delta3;
        j["nu_delta4"] = e.single.nu_delta4;
        j["nu_lambda"] = e.nu_lambda;
        j["nu_residual"] = e.nu_residual;
    }
    return j;
}

// ---------------------------------------------------------------------------
// Whole spec

inline Json spec_to_json(const RunSpec& spec)
{
    const auto& s = spec.scenario;
    Json j;
    j["name"] = s.name;
    j["model"] = model_name(s.params);
    j["params"] = params_to_json(s.params);
    j["initial_state"] = s.initial_state;
    j["t_end"] = s.t_end;
    j["sample_dt"] = s.sample_dt;
    j["micromotion_map"] = s.micromotion_map;
    j["monitored"] = s.monitored;
    j["rel_tol"] = s.propagation.rel_tol;
    j["abs_tol"] = s.propagation.abs_tol;
    j["max_step_fraction"] = s.propagation.max_step_fraction;
    j["assumptions"] = s.assumptions;
    j["scan"] = {{"nu_delta2_min", spec.scan.nu_delta2_min},
                 {"nu_delta2_max", spec.scan.nu_delta2_max},
                 {"points", spec.scan.points},
                 {"t_obs", spec.scan.t_obs}};
    j["scaling"] = {{"nu_trap_list", spec.nu_trap_list}};
    return j;
}

namespace detail {

template <class T>
T read(const Json& j, const char* key, T fallback)
{
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

inline void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where)
{
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw ConfigError("unknown config key '" + key + "'" + where);
}

} // namespace detail

inline RunSpec spec_from_json(const Json& j)
{
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    detail::reject_unknown(j,
                           {"name", "model", "params", "initial_state", "t_end", "sample_dt", "micromotion_map",
                            "monitored", "rel_tol", "abs_tol", "max_step_fraction", "assumptions", "scan", "scaling"},
                           "");
    if (!j.contains("model")) throw ConfigError("config key 'model' is required");
    if (!j.contains("params")) throw ConfigError("config key 'params' is required");

    RunSpec spec;
    auto& s = spec.scenario;
    s.name = detail::read<std::string>(j, "name", "custom");
    s.params = params_from_json(detail::read<std::string>(j, "model", ""), j.at("params"));
    s.initial_state = detail::read<std::string>(j, "initial_state", "1");
    s.t_end = detail::read<double>(j, "t_end", 1.0);
    s.sample_dt = detail::read<double>(j, "sample_dt", 1e-3);
    s.micromotion_map = detail::read<bool>(j, "micromotion_map", true);
    s.monitored = detail::read<std::vector<std::string>>(j, "monitored", {});
    s.propagation.rel_tol = detail::read<double>(j, "rel_tol", 1e-10);
    s.propagation.abs_tol = detail::read<double>(j, "abs_tol", 1e-12);
    s.propagation.max_step_fraction = detail::read<double>(j, "max_step_fraction", 1.0 / 40.0);
    s.propagation.sample_dt = s.sample_dt;
    s.assumptions = detail::read<std::vector<std::string>>(j, "assumptions", {});

    if (j.contains("scan")) {
        const Json& sc = j.at("scan");
        detail::reject_unknown(sc, {"nu_delta2_min", "nu_delta2_max", "points", "t_obs"}, " in 'scan'");
        spec.scan.nu_delta2_min = detail::read<double>(sc, "nu_delta2_min", spec.scan.nu_delta2_min);
        spec.scan.nu_delta2_max = detail::read<double>(sc, "nu_delta2_max", spec.scan.nu_delta2_max);
        spec.scan.points = detail::read<int>(sc, "points", spec.scan.points);
        spec.scan.t_obs = detail::read<double>(sc, "t_obs", spec.scan.t_obs);
        if (spec.scan.points < 1) throw ConfigError("scan.points must be >= 1");
    }
    if (j.contains("scaling")) {
        const Json& sc = j.at("scaling");
        detail::reject_unknown(sc, {"nu_trap_list"}, " in 'scaling'");
        spec.nu_trap_list = detail::read<std::vector<double>>(sc, "nu_trap_list", spec.nu_trap_list);
    }

    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

/// Sets one leaf of a config document from "key=value".
inline void apply_override(Json& doc, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    Json value;
    try {
        value = Json::parse(raw);
    } catch (const nlohmann::json::parse_error&) {
        value = raw; // bare strings such as initial_state=2_1 3_2
    }

    if (const auto dot = key.find('.'); dot != std::string::npos) {
        const std::string section = key.substr(0, dot);
        const std::string leaf = key.substr(dot + 1);
        if (section != "params" && section != "scan" && section != "scaling")
            throw ConfigError("unknown config section '" + section + "'");
        if (!doc.contains(section) || !doc[section].contains(leaf)) {
            // params may be absent from a sparse config; anything else must exist
            if (section != "params") throw ConfigError("unknown config key '" + key + "'");
        }
        doc[section][leaf] = value;
        return;
    }

    std::vector<Json*> hits;
    if (doc.contains(key)) hits.push_back(&doc[key]);
    for (const char* section : {"params", "scan", "scaling"})
        if (doc.contains(section) && doc[section].is_object() && doc[section].contains(key))
            hits.push_back(&doc[section][key]);
    if (hits.empty()) {
        // Parameters that default to zero may be missing from the document.
        if (key.rfind("nu_", 0) == 0 && doc.contains("params")) {
            doc["params"][key] = value;
            return;
        }
        throw ConfigError("unknown config key '" + key + "'");
    }
    if (hits.size() > 1) throw ConfigError("config key '" + key + "' is ambiguous; use a dotted path");
    *hits.front() = value;
}

inline Json load_json_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

/// Exactly one of preset/config_path must be given.
inline RunSpec resolve_spec(const std::optional<std::string>& preset_name, const std::optional<std::string>& config_path,
                            const std::vector<std::string>& overrides)
{
    if (preset_name.has_value() == config_path.has_value())
        throw ConfigError("give exactly one of --preset or --config");
    Json doc;
    if (preset_name) {
        RunSpec base;
        base.scenario = preset(*preset_name);
        if (*preset_name == "fig3") base.scan.t_obs = base.scenario.t_end;
        doc = spec_to_json(base);
    } else {
        doc = load_json_file(*config_path);
    }
    for (const auto& o : overrides) apply_override(doc, o);
    return spec_from_json(doc);
}

} // namespace quadfold
