#include "cuspflow/config.hpp"

#include "cuspflow/errors.hpp"

#include <cmath>
#include <set>

namespace cuspflow {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw config_error(path + ": expected an object");
    for (const auto& [k, v] : obj.items()) {
        if (!allowed.count(k)) {
            throw config_error("unknown key: " + (path.empty() ? k : path + "." + k));
        }
    }
}

double num(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw config_error(path + "." + key + ": expected a number");
    return v.get<double>();
}

void positive(double v, const std::string& keypath) {
    if (!(v > 0.0)) throw config_error(keypath + ": must be positive");
}

} // namespace

double RunConfig::grading() const {
    if (grid.x_min_factor) {
        return -std::log10(*grid.x_min_factor);
    }
    return grid.grading;
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }

    require_keys(j, "", {"profile", "mode", "eps0", "grid", "control", "outputs", "margins",
                         "override"});
    RunConfig c;

    if (!j.contains("profile")) throw config_error("missing section: profile");
    {
        const auto& p = j.at("profile");
        require_keys(p, "profile", {"family", "params", "R"});
        if (p.contains("family")) {
            if (!p.at("family").is_string()) throw config_error("profile.family: expected a string");
            c.profile.family = p.at("family").get<std::string>();
        }
        if (p.contains("params")) {
            if (!p.at("params").is_array()) throw config_error("profile.params: expected an array");
            c.profile.params.clear();
            for (const auto& v : p.at("params")) {
                if (!v.is_number()) throw config_error("profile.params: expected numbers");
                c.profile.params.push_back(v.get<double>());
            }
        }
        c.profile.R = num(p, "profile", "R", c.profile.R);
        positive(c.profile.R, "profile.R");
    }

    if (j.contains("mode")) {
        const auto& m = j.at("mode");
        if (!m.is_string()) throw config_error("mode: expected a string");
        const auto s = m.get<std::string>();
        if (s == "certified") c.mode = RunMode::certified;
        else if (s == "uncertified") c.mode = RunMode::uncertified;
        else throw config_error("mode: must be \"certified\" or \"uncertified\"");
    }

    if (j.contains("eps0")) {
        if (c.mode == RunMode::certified) {
            throw config_error("eps0: not allowed in certified mode (derived from the "
                               "constant selection; use override.eps0 to force one)");
        }
        if (!j.at("eps0").is_number()) throw config_error("eps0: expected a number");
        c.eps0 = j.at("eps0").get<double>();
        if (!(*c.eps0 > 0.0) || *c.eps0 > 1.0) throw config_error("eps0: must lie in (0, 1]");
    } else if (c.mode == RunMode::uncertified) {
        c.eps0 = 1.0; // canonical uncertified choice
    }

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        require_keys(g, "grid", {"N", "grading", "x_min_factor"});
        if (g.contains("N")) {
            if (!g.at("N").is_number_integer() || g.at("N").get<long long>() < 16) {
                throw config_error("grid.N: must be an integer >= 16");
            }
            c.grid.N = g.at("N").get<std::size_t>();
        }
        c.grid.grading = num(g, "grid", "grading", c.grid.grading);
        positive(c.grid.grading, "grid.grading");
        if (g.contains("x_min_factor")) {
            const double f = num(g, "grid", "x_min_factor", 0.0);
            if (!(f > 0.0) || f >= 1.0) throw config_error("grid.x_min_factor: must lie in (0, 1)");
            c.grid.x_min_factor = f;
        }
    }

    if (j.contains("control")) {
        const auto& ct = j.at("control");
        require_keys(ct, "control",
                     {"safety", "dt_max", "eps_stop", "t_max", "rk_tolerance"});
        c.control.safety = num(ct, "control", "safety", c.control.safety);
        c.control.dt_max = num(ct, "control", "dt_max", c.control.dt_max);
        c.control.t_max = num(ct, "control", "t_max", c.control.t_max);
        c.control.rk_tolerance = num(ct, "control", "rk_tolerance", c.control.rk_tolerance);
        positive(c.control.safety, "control.safety");
        if (c.control.safety >= 1.0) throw config_error("control.safety: must lie in (0, 1)");
        positive(c.control.dt_max, "control.dt_max");
        positive(c.control.t_max, "control.t_max");
        positive(c.control.rk_tolerance, "control.rk_tolerance");
        if (ct.contains("eps_stop")) {
            const double es = num(ct, "control", "eps_stop", 0.0);
            positive(es, "control.eps_stop");
            c.control.eps_stop = es;
        }
    }

    if (j.contains("outputs")) {
        const auto& o = j.at("outputs");
        require_keys(o, "outputs", {"directory", "snapshot_stride", "formats"});
        if (o.contains("directory")) {
            if (!o.at("directory").is_string())
                throw config_error("outputs.directory: expected a string");
            c.outputs.directory = o.at("directory").get<std::string>();
        }
        if (o.contains("snapshot_stride")) {
            if (!o.at("snapshot_stride").is_number_integer() ||
                o.at("snapshot_stride").get<long long>() < 1) {
                throw config_error("outputs.snapshot_stride: must be an integer >= 1");
            }
            c.outputs.snapshot_stride = o.at("snapshot_stride").get<int>();
        }
        if (o.contains("formats")) {
            if (!o.at("formats").is_array())
                throw config_error("outputs.formats: expected an array");
            c.outputs.write_csv = false;
            for (const auto& f : o.at("formats")) {
                const auto s = f.is_string() ? f.get<std::string>() : std::string();
                if (s == "csv") c.outputs.write_csv = true;
                else if (s == "json") continue; // report JSON is always written
                else throw config_error("outputs.formats: unknown format \"" + s + "\"");
            }
        }
    }

    if (j.contains("margins")) {
        const auto& m = j.at("margins");
        require_keys(m, "margins", {"k_bound", "condition3"});
        c.margins.k_bound = num(m, "margins", "k_bound", c.margins.k_bound);
        c.margins.condition3 = num(m, "margins", "condition3", c.margins.condition3);
        if (c.margins.k_bound < 0.0 || c.margins.k_bound >= 1.0)
            throw config_error("margins.k_bound: must lie in [0, 1)");
        if (c.margins.condition3 < 0.0)
            throw config_error("margins.condition3: must be nonnegative");
    }

    if (j.contains("override")) {
        if (c.mode != RunMode::certified) {
            throw config_error("override: only allowed in certified mode");
        }
        const auto& o = j.at("override");
        require_keys(o, "override", {"beta", "kappa", "eps0"});
        ConstantOverrides ov;
        if (o.contains("beta")) ov.beta = num(o, "override", "beta", 0.0);
        if (o.contains("kappa")) ov.kappa = num(o, "override", "kappa", 0.0);
        if (o.contains("eps0")) ov.eps0 = num(o, "override", "eps0", 0.0);
        c.overrides = ov;
    }

    return c;
}

json config_to_json(const RunConfig& c) {
    json j;
    j["profile"] = {{"family", c.profile.family},
                    {"params", c.profile.params},
                    {"R", c.profile.R}};
    j["mode"] = c.mode == RunMode::certified ? "certified" : "uncertified";
    if (c.eps0) j["eps0"] = *c.eps0;
    j["grid"] = {{"N", c.grid.N}, {"grading", c.grading()}};
    j["control"] = {{"safety", c.control.safety},
                    {"dt_max", c.control.dt_max},
                    {"t_max", c.control.t_max},
                    {"rk_tolerance", c.control.rk_tolerance}};
    if (c.control.eps_stop) j["control"]["eps_stop"] = *c.control.eps_stop;
    j["outputs"] = {{"snapshot_stride", c.outputs.snapshot_stride},
                    {"formats", c.outputs.write_csv ? json::array({"csv", "json"})
                                                    : json::array({"json"})}};
    if (c.outputs.directory) j["outputs"]["directory"] = *c.outputs.directory;
    j["margins"] = {{"k_bound", c.margins.k_bound}, {"condition3", c.margins.condition3}};
    if (c.overrides) {
        json o = json::object();
        if (c.overrides->beta) o["beta"] = *c.overrides->beta;
        if (c.overrides->kappa) o["kappa"] = *c.overrides->kappa;
        if (c.overrides->eps0) o["eps0"] = *c.overrides->eps0;
        j["override"] = o;
    }
    return j;
}

} // namespace cuspflow
