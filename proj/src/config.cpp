#include "aoisim/config.hpp"

#include <fstream>

namespace aoisim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
    throw ConfigError(msg);
}

const json& require(const json& j, const std::string& key, const std::string& scope) {
    if (!j.is_object() || !j.contains(key))
        fail("missing field " + (scope.empty() ? key : scope + "." + key));
    return j.at(key);
}

template <typename T>
T as(const json& j, const std::string& name) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        fail("field " + name + " has the wrong type");
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, const std::string& scope, T fallback) {
    if (!j.is_object() || !j.contains(key))
        return fallback;
    return as<T>(j.at(key), scope.empty() ? key : scope + "." + key);
}

ProbFunction prob_from_json(const json& j) {
    const std::string kind = as<std::string>(require(j, "kind", "policy.prob"), "policy.prob.kind");
    if (kind == "constant")
        return ConstantProb{as<double>(require(j, "k", "policy.prob"), "policy.prob.k")};
    if (kind == "linear")
        return LinearProb{as<double>(require(j, "c", "policy.prob"), "policy.prob.c")};
    if (kind == "elliptical")
        return EllipticalProb{as<double>(require(j, "c", "policy.prob"), "policy.prob.c")};
    fail("policy.prob.kind must be one of constant|linear|elliptical");
}

SystemParams params_from_json(const json& j) {
    SystemParams p;
    p.num_devices = get_or<int>(j, "num_devices", "params", p.num_devices);
    p.battery_capacity = as<int>(require(j, "battery_capacity", "params"), "params.battery_capacity");
    p.tx_cost = as<int>(require(j, "tx_cost", "params"), "params.tx_cost");
    p.energy_floor = as<int>(require(j, "energy_floor", "params"), "params.energy_floor");
    p.harvest_prob = as<double>(require(j, "harvest_prob", "params"), "params.harvest_prob");
    p.aoi_max = as<int>(require(j, "aoi_max", "params"), "params.aoi_max");
    return p;
}

PolicyFamily family_from_string(const std::string& s) {
    if (s == "none") return PolicyFamily::None;
    if (s == "threshold_only") return PolicyFamily::ThresholdOnly;
    if (s == "proposed_constant") return PolicyFamily::ProposedConstant;
    if (s == "proposed_linear") return PolicyFamily::ProposedLinear;
    if (s == "proposed_elliptical") return PolicyFamily::ProposedElliptical;
    if (s == "adra") return PolicyFamily::Adra;
    fail("grid.family must be one of none|threshold_only|proposed_constant|proposed_linear|"
         "proposed_elliptical|adra");
}

SimBudget budget_from_json(const json& j, const std::string& scope, SimBudget fallback) {
    SimBudget b = fallback;
    b.num_slots = get_or<uint64_t>(j, "num_slots", scope, b.num_slots);
    b.warmup_slots = get_or<uint64_t>(j, "warmup_slots", scope, b.warmup_slots);
    b.num_replications = get_or<uint32_t>(j, "num_replications", scope, b.num_replications);
    return b;
}

GridSpec grid_from_json(const json& j, const SystemParams& params, uint64_t seed) {
    GridSpec spec;
    const std::string family_name =
        as<std::string>(require(j, "family", "grid"), "grid.family");
    spec.grid = ParamGrid::defaults(family_from_string(family_name), params);
    if (j.contains("alpha"))
        spec.grid.alpha_grid = as<std::vector<double>>(j.at("alpha"), "grid.alpha");
    if (j.contains("tau"))
        spec.grid.tau_grid = as<std::vector<double>>(j.at("tau"), "grid.tau");
    if (j.contains("c"))
        spec.grid.c_grid = as<std::vector<double>>(j.at("c"), "grid.c");
    if (j.contains("k"))
        spec.grid.k_grid = as<std::vector<double>>(j.at("k"), "grid.k");
    if (j.contains("adra_threshold"))
        spec.grid.adra_threshold_grid =
            as<std::vector<int>>(j.at("adra_threshold"), "grid.adra_threshold");
    if (j.contains("adra_p"))
        spec.grid.adra_p_grid = as<std::vector<double>>(j.at("adra_p"), "grid.adra_p");
    const std::string objective = get_or<std::string>(j, "objective", "grid", "aaoi");
    if (objective == "aaoi")
        spec.grid.objective = Objective::Aaoi;
    else if (objective == "avp")
        spec.grid.objective = Objective::Avp;
    else
        fail("grid.objective must be aaoi or avp");
    if (j.contains("budget"))
        spec.grid.budget = budget_from_json(j.at("budget"), "grid.budget", spec.grid.budget);
    if (j.contains("screen"))
        spec.grid.screen_budget =
            budget_from_json(j.at("screen"), "grid.screen", spec.grid.screen_budget);
    spec.grid.two_stage = get_or<bool>(j, "two_stage", "grid", spec.grid.two_stage);
    spec.grid.refine_top = get_or<int>(j, "refine_top", "grid", spec.grid.refine_top);
    spec.grid.seed = seed;
    const std::string k_rule = get_or<std::string>(j, "k_rule", "grid", "");
    if (k_rule == "inv_sqrt_d")
        spec.k_inv_sqrt_d = true;
    else if (!k_rule.empty())
        fail("grid.k_rule must be inv_sqrt_d when present");
    return spec;
}

}  // namespace

nlohmann::json load_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        fail("config is not valid JSON: " + std::string(e.what()));
    }
    return j;
}

PolicyConfig policy_from_json(const nlohmann::json& j) {
    const std::string kind = as<std::string>(require(j, "kind", "policy"), "policy.kind");
    if (kind == "none")
        return NoPolicy{};
    if (kind == "threshold_only")
        return ThresholdOnly{as<double>(require(j, "alpha", "policy"), "policy.alpha"),
                             as<double>(require(j, "tau", "policy"), "policy.tau")};
    if (kind == "proposed")
        return Proposed{as<double>(require(j, "alpha", "policy"), "policy.alpha"),
                        as<double>(require(j, "tau", "policy"), "policy.tau"),
                        prob_from_json(require(j, "prob", "policy"))};
    if (kind == "adra") {
        Adra adra;
        adra.age_threshold =
            as<int>(require(j, "age_threshold", "policy"), "policy.age_threshold");
        adra.p = as<double>(require(j, "p", "policy"), "policy.p");
        adra.respect_reserve = get_or<bool>(j, "respect_reserve", "policy", false);
        return adra;
    }
    fail("policy.kind must be one of none|threshold_only|proposed|adra");
}

nlohmann::json policy_to_json(const PolicyConfig& policy) {
    json j;
    std::visit(
        [&](const auto& pol) {
            using T = std::decay_t<decltype(pol)>;
            if constexpr (std::is_same_v<T, NoPolicy>) {
                j["kind"] = "none";
            } else if constexpr (std::is_same_v<T, ThresholdOnly>) {
                j["kind"] = "threshold_only";
                j["alpha"] = pol.alpha;
                j["tau"] = pol.tau;
            } else if constexpr (std::is_same_v<T, Proposed>) {
                j["kind"] = "proposed";
                j["alpha"] = pol.alpha;
                j["tau"] = pol.tau;
                if (const auto* k = std::get_if<ConstantProb>(&pol.prob))
                    j["prob"] = {{"kind", "constant"}, {"k", k->k}};
                else if (const auto* lin = std::get_if<LinearProb>(&pol.prob))
                    j["prob"] = {{"kind", "linear"}, {"c", lin->c}};
                else
                    j["prob"] = {{"kind", "elliptical"},
                                 {"c", std::get<EllipticalProb>(pol.prob).c}};
            } else {
                j["kind"] = "adra";
                j["age_threshold"] = pol.age_threshold;
                j["p"] = pol.p;
                if (pol.respect_reserve)
                    j["respect_reserve"] = true;
            }
        },
        policy);
    return j;
}

ExperimentConfig parse_config(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.params = params_from_json(require(j, "params", ""));

    if (j.contains("policy"))
        cfg.policy = policy_from_json(j.at("policy"));

    if (j.contains("sim")) {
        const json& sim = j.at("sim");
        cfg.num_slots = get_or<uint64_t>(sim, "num_slots", "sim", cfg.num_slots);
        cfg.warmup_slots = get_or<uint64_t>(sim, "warmup_slots", "sim", cfg.warmup_slots);
        cfg.num_replications =
            get_or<uint32_t>(sim, "num_replications", "sim", cfg.num_replications);
        cfg.seed = get_or<uint64_t>(sim, "seed", "sim", cfg.seed);
    }

    if (j.contains("d_values")) {
        cfg.d_values = as<std::vector<int>>(j.at("d_values"), "d_values");
        for (int d : cfg.d_values)
            if (d < 1)
                fail("d_values entries must be >= 1");
    }

    if (j.contains("grid"))
        cfg.grid = grid_from_json(j.at("grid"), cfg.params, cfg.seed);

    if (j.contains("compare")) {
        const json& cmp = j.at("compare");
        const json& entries = require(cmp, "entries", "compare");
        if (!entries.is_array())
            fail("compare.entries must be an array");
        for (size_t i = 0; i < entries.size(); ++i) {
            const json& e = entries[i];
            const std::string scope = "compare.entries[" + std::to_string(i) + "]";
            CompareEntry entry;
            entry.label = as<std::string>(require(e, "label", scope), scope + ".label");
            int forms = 0;
            if (e.contains("policy")) {
                entry.fixed = policy_from_json(e.at("policy"));
                ++forms;
            }
            if (e.contains("grid")) {
                entry.grid = grid_from_json(e.at("grid"), cfg.params, cfg.seed);
                ++forms;
            }
            if (e.contains("per_d")) {
                const json& m = e.at("per_d");
                if (!m.is_object())
                    fail(scope + ".per_d must be an object keyed by device count");
                for (const auto& [key, value] : m.items()) {
                    int d = 0;
                    try {
                        d = std::stoi(key);
                    } catch (const std::exception&) {
                        fail(scope + ".per_d key '" + key + "' is not a device count");
                    }
                    entry.per_d[d] = policy_from_json(value);
                }
                ++forms;
            }
            if (forms != 1)
                fail(scope + " must define exactly one of policy|grid|per_d");
            cfg.compare_entries.push_back(std::move(entry));
        }
    }

    if (j.contains("analyze")) {
        const std::string form =
            get_or<std::string>(j.at("analyze"), "threshold_form", "analyze", "corrected");
        if (form == "corrected")
            cfg.threshold_form = dtmc::ThresholdForm::Corrected;
        else if (form == "literal")
            cfg.threshold_form = dtmc::ThresholdForm::Literal;
        else
            fail("analyze.threshold_form must be corrected or literal");
    }

    cfg.figure = get_or<std::string>(j, "figure", "", "");
    if (!cfg.figure.empty() && cfg.figure != "fig4" && cfg.figure != "fig5" &&
        cfg.figure != "fig6")
        fail("figure must be one of fig4|fig5|fig6 when present");

    if (j.contains("output")) {
        const json& out = j.at("output");
        cfg.output_path = get_or<std::string>(out, "path", "output", cfg.output_path);
        const std::string fmt = get_or<std::string>(out, "format", "output", "csv");
        if (fmt == "csv")
            cfg.output_format = OutputFormat::Csv;
        else if (fmt == "json")
            cfg.output_format = OutputFormat::Json;
        else
            fail("output.format must be csv or json");
    }
    return cfg;
}

uint64_t config_hash(const nlohmann::json& j) {
    // The output destination does not influence the computation, so it stays
    // out of the hash: redirecting results must not change their provenance.
    nlohmann::json canonical_json = j;
    canonical_json.erase("output");
    const std::string canonical = canonical_json.dump();
    uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char ch : canonical) {
        hash ^= ch;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

}  // namespace aoisim
