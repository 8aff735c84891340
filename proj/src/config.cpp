#include "rearr/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rearr {

using nlohmann::json;

TargetSeq TargetSpec::to_sequence() const {
    switch (kind) {
        case Kind::Constant: return TargetSeq::constant(value);
        case Kind::Linear: return TargetSeq::linear(value);
        case Kind::List: return TargetSeq::list(values);
        case Kind::Extended: return corollary_sequence(value, infinite, inf_sign);
    }
    return TargetSeq::constant(0.0);
}

namespace {

TargetSpec parse_target_spec(const json& j, const std::string& path) {
    TargetSpec t;
    if (!j.is_object()) throw ConfigError(path, "target spec must be an object");
    std::string kind = j.value("kind", "");
    if (kind == "constant") {
        t.kind = TargetSpec::Kind::Constant;
        if (!j.contains("value") || !j["value"].is_number()) throw ConfigError(path + ".value", "number required");
        t.value = j["value"].get<double>();
    } else if (kind == "linear") {
        t.kind = TargetSpec::Kind::Linear;
        if (!j.contains("slope") || !j["slope"].is_number()) throw ConfigError(path + ".slope", "number required");
        t.value = j["slope"].get<double>();
    } else if (kind == "list") {
        t.kind = TargetSpec::Kind::List;
        if (!j.contains("values") || !j["values"].is_array()) throw ConfigError(path + ".values", "array required");
        for (const auto& v : j["values"]) {
            if (!v.is_number()) throw ConfigError(path + ".values", "numbers required");
            t.values.push_back(v.get<double>());
        }
        if (t.values.empty()) throw ConfigError(path + ".values", "must not be empty");
    } else if (kind == "extended") {
        t.kind = TargetSpec::Kind::Extended;
        if (!j.contains("value")) throw ConfigError(path + ".value", "required");
        const auto& v = j["value"];
        if (v.is_number()) {
            t.value = v.get<double>();
        } else if (v.is_string()) {
            std::string s = v.get<std::string>();
            if (s == "+inf" || s == "inf") {
                t.infinite = true;
                t.inf_sign = +1;
            } else if (s == "-inf") {
                t.infinite = true;
                t.inf_sign = -1;
            } else {
                throw ConfigError(path + ".value", "expected number, \"+inf\" or \"-inf\"");
            }
        } else {
            throw ConfigError(path + ".value", "expected number or string");
        }
    } else {
        throw ConfigError(path + ".kind", "expected constant | linear | list | extended");
    }
    return t;
}

} // namespace

SeriesSource RunConfig::make_source() const {
    if (series_inline) return inline_series(*series_inline);
    return source_by_name(series_name);
}

TargetSpec RunConfig::target_for(const Permutation& sigma) const {
    auto it = targets.find(sigma.key());
    if (it != targets.end()) return it->second.second;
    if (default_target) return *default_target;
    throw ConfigError("targets", "no target for permutation \"" + sigma.to_string() + "\" and no default");
}

PermTargets RunConfig::make_targets() const {
    PermTargets t(dimension);
    for (const auto& sigma : Permutation::all(dimension)) t.set(sigma, target_for(sigma).to_sequence());
    return t;
}

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");

    RunConfig c;
    if (!j.contains("dimension") || !j["dimension"].is_number_integer())
        throw ConfigError("dimension", "integer required");
    c.dimension = j["dimension"].get<int>();
    if (c.dimension < 2 || c.dimension > 4) throw ConfigError("dimension", "supported range is 2..4");

    if (j.contains("series")) {
        const auto& s = j["series"];
        if (s.is_string()) {
            c.series_name = s.get<std::string>();
        } else if (s.is_object()) {
            if (s.contains("inline")) {
                if (!s["inline"].is_array()) throw ConfigError("series.inline", "array required");
                std::vector<double> vals;
                for (const auto& v : s["inline"]) {
                    if (!v.is_number()) throw ConfigError("series.inline", "numbers required");
                    vals.push_back(v.get<double>());
                }
                if (vals.empty()) throw ConfigError("series.inline", "must not be empty");
                c.series_inline = std::move(vals);
            } else if (s.contains("name")) {
                c.series_name = s["name"].get<std::string>();
            } else {
                throw ConfigError("series", "expected name or inline");
            }
        } else {
            throw ConfigError("series", "expected string or object");
        }
    }
    if (!c.series_inline) {
        try {
            (void)source_by_name(c.series_name);
        } catch (const std::exception& e) {
            throw ConfigError("series", e.what());
        }
    }

    if (j.contains("targets")) {
        if (!j["targets"].is_object()) throw ConfigError("targets", "object required");
        for (const auto& [key, val] : j["targets"].items()) {
            if (key == "default") {
                c.default_target = parse_target_spec(val, "targets.default");
                continue;
            }
            auto p = Permutation::parse(key, c.dimension);
            if (!p) throw ConfigError("targets", "bad permutation key \"" + key + "\" (one-line images, e.g. \"2 1\")");
            c.targets[p->key()] = {*p, parse_target_spec(val, "targets[\"" + key + "\"]")};
        }
    }
    // validate coverage
    for (const auto& sigma : Permutation::all(c.dimension)) {
        if (!c.targets.count(sigma.key()) && !c.default_target)
            throw ConfigError("targets", "no target for permutation \"" + sigma.to_string() + "\" and no default");
    }

    if (j.contains("budget")) {
        const auto& b = j["budget"];
        if (!b.is_object()) throw ConfigError("budget", "object required");
        if (b.contains("depth")) {
            int d = b["depth"].get<int>();
            if (d < 1 || d > 64) throw ConfigError("budget.depth", "expected 1..64");
            c.budget.depth = static_cast<std::uint32_t>(d);
        }
        if (b.contains("slab_budget")) {
            std::int64_t s = b["slab_budget"].get<std::int64_t>();
            if (s < 1) throw ConfigError("budget.slab_budget", "must be positive");
            c.budget.slab_budget = static_cast<std::uint64_t>(s);
        }
        if (b.contains("recursion_depths")) {
            if (!b["recursion_depths"].is_object()) throw ConfigError("budget.recursion_depths", "object required");
            for (const auto& [key, val] : b["recursion_depths"].items()) {
                int q = std::stoi(key);
                int d = val.get<int>();
                if (q < 2 || q >= c.dimension) throw ConfigError("budget.recursion_depths", "dim key out of range");
                if (d < 1) throw ConfigError("budget.recursion_depths", "depth must be positive");
                c.budget.recursion_depths[q] = static_cast<std::uint32_t>(d);
            }
        }
    }

    if (j.contains("tolerance")) {
        c.tolerance = j["tolerance"].get<double>();
        if (!(c.tolerance > 0)) throw ConfigError("tolerance", "must be positive");
    }
    if (j.contains("witness")) {
        const auto& w = j["witness"];
        if (w.contains("horizon")) c.witness_horizon = w["horizon"].get<std::uint64_t>();
        if (w.contains("bound")) c.witness_bound = w["bound"].get<double>();
        if (c.witness_horizon < 1) throw ConfigError("witness.horizon", "must be >= 1");
        if (!(c.witness_bound > 0)) throw ConfigError("witness.bound", "must be positive");
    }
    if (j.contains("split_horizon")) {
        c.split_horizon = j["split_horizon"].get<std::uint64_t>();
        if (c.split_horizon < 1) throw ConfigError("split_horizon", "must be >= 1");
    }
    if (j.contains("visit_gain")) {
        c.visit_gain = j["visit_gain"].get<double>();
        if (!(c.visit_gain > 0)) throw ConfigError("visit_gain", "must be positive");
    }

    if (j.contains("fubini")) {
        const auto& f = j["fubini"];
        if (f.contains("quad_tol")) {
            c.quad_tol = f["quad_tol"].get<double>();
            if (!(c.quad_tol > 0)) throw ConfigError("fubini.quad_tol", "must be positive");
        }
        if (f.contains("box_prefixes")) {
            int bp = f["box_prefixes"].get<int>();
            if (bp < 1) throw ConfigError("fubini.box_prefixes", "must be positive");
            c.box_prefixes = static_cast<std::uint32_t>(bp);
        }
        if (f.contains("unit_cube")) c.unit_cube = f["unit_cube"].get<bool>();
        if (f.contains("boxes")) {
            if (!f["boxes"].is_array()) throw ConfigError("fubini.boxes", "array required");
            for (const auto& box : f["boxes"]) {
                if (!box.is_array() || static_cast<int>(box.size()) != c.dimension)
                    throw ConfigError("fubini.boxes", "each box needs one limit per coordinate");
                std::vector<double> lims;
                for (const auto& v : box) lims.push_back(v.get<double>());
                c.boxes.push_back(std::move(lims));
            }
        }
    }

    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace rearr
