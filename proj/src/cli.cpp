#include "aoisim/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "aoisim/config.hpp"
#include "aoisim/report.hpp"

namespace aoisim::cli {

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<uint64_t> seed;
    std::optional<std::string> output;
    std::optional<std::string> format;
    int threads = 0;  // 0 = hardware concurrency
    bool emit_plotdata = false;
};

int effective_threads(int requested) {
    if (requested > 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Loads the config, applies CLI overrides to the JSON *before* parsing so the
// reported config hash matches what actually ran.
struct LoadedConfig {
    ExperimentConfig cfg;
    uint64_t hash = 0;
};

LoadedConfig load(const CommonOptions& opt) {
    nlohmann::json j = load_config_json(opt.config_path);
    if (opt.seed) {
        if (!j.contains("sim"))
            j["sim"] = nlohmann::json::object();
        j["sim"]["seed"] = *opt.seed;
    }
    if (opt.output) {
        if (!j.contains("output"))
            j["output"] = nlohmann::json::object();
        j["output"]["path"] = *opt.output;
    }
    if (opt.format) {
        if (!j.contains("output"))
            j["output"] = nlohmann::json::object();
        j["output"]["format"] = *opt.format;
    }
    LoadedConfig loaded;
    loaded.hash = config_hash(j);
    loaded.cfg = parse_config(j);
    loaded.cfg.params.validate();
    return loaded;
}

Metadata base_metadata(const LoadedConfig& loaded, const std::string& command) {
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "0x%016llx",
                  static_cast<unsigned long long>(loaded.hash));
    return {{"tool", kToolVersion},
            {"command", command},
            {"config_hash", hash_hex},
            {"seed", std::to_string(loaded.cfg.seed)}};
}

// Flattens a policy into stable report columns; absent parameters stay null.
void policy_columns(const PolicyConfig& policy, nlohmann::json& row) {
    row["policy"] = policy_label(policy);
    row["alpha"] = nullptr;
    row["tau"] = nullptr;
    row["c"] = nullptr;
    row["k"] = nullptr;
    row["age_threshold"] = nullptr;
    row["p"] = nullptr;
    if (const auto* th = std::get_if<ThresholdOnly>(&policy)) {
        row["alpha"] = th->alpha;
        row["tau"] = th->tau;
    } else if (const auto* prop = std::get_if<Proposed>(&policy)) {
        row["alpha"] = prop->alpha;
        row["tau"] = prop->tau;
        if (const auto* k = std::get_if<ConstantProb>(&prop->prob))
            row["k"] = k->k;
        else if (const auto* lin = std::get_if<LinearProb>(&prop->prob))
            row["c"] = lin->c;
        else
            row["c"] = std::get<EllipticalProb>(prop->prob).c;
    } else if (const auto* adra = std::get_if<Adra>(&policy)) {
        row["age_threshold"] = adra->age_threshold;
        row["p"] = adra->p;
    }
}

const std::vector<std::string> kPolicyColumns = {"policy", "alpha",         "tau", "c",
                                                 "k",      "age_threshold", "p"};

nlohmann::json result_row(int d, const PolicyConfig& policy, const SimResult& res) {
    nlohmann::json row;
    row["d"] = d;
    policy_columns(policy, row);
    row["aaoi"] = res.aaoi;
    row["avp"] = res.avp;
    row["avp_defined"] = res.avp_defined;
    row["ci_halfwidth_aaoi"] = res.ci_halfwidth_aaoi;
    row["mean_energy"] = res.mean_energy_empirical;
    row["min_energy"] = res.min_energy_observed;
    row["successes"] = res.counts.successes;
    row["collisions"] = res.counts.collisions;
    row["idle_slots"] = res.counts.idle_slots;
    row["discards"] = res.counts.discards;
    row["packets_generated"] = res.counts.packets_generated;
    return row;
}

std::vector<std::string> result_columns() {
    std::vector<std::string> cols = {"d"};
    cols.insert(cols.end(), kPolicyColumns.begin(), kPolicyColumns.end());
    for (const char* c : {"aaoi", "avp", "avp_defined", "ci_halfwidth_aaoi", "mean_energy",
                          "min_energy", "successes", "collisions", "idle_slots", "discards",
                          "packets_generated"})
        cols.push_back(c);
    return cols;
}

SimConfig sim_config_for(const ExperimentConfig& cfg, const PolicyConfig& policy, int d) {
    SimConfig sim;
    sim.params = cfg.params;
    sim.params.num_devices = d;
    sim.policy = policy;
    sim.num_slots = cfg.num_slots;
    sim.warmup_slots = cfg.warmup_slots;
    sim.num_replications = cfg.num_replications;
    sim.seed = cfg.seed;
    return sim;
}

ParamGrid resolve_grid(const GridSpec& spec, int d) {
    ParamGrid grid = spec.grid;
    if (spec.k_inv_sqrt_d)
        grid.k_grid = {1.0 / std::sqrt(static_cast<double>(d))};
    return grid;
}

int cmd_simulate(const CommonOptions& opt) {
    const LoadedConfig loaded = load(opt);
    const ExperimentConfig& cfg = loaded.cfg;
    if (!cfg.policy)
        throw ConfigError("simulate requires a policy");
    const SimConfig sim = sim_config_for(cfg, *cfg.policy, cfg.params.num_devices);
    const SimResult res = run_simulation(sim, effective_threads(opt.threads));

    Table table;
    table.columns = result_columns();
    for (const char* c : {"num_slots", "warmup_slots", "num_replications"})
        table.columns.push_back(c);
    nlohmann::json row = result_row(cfg.params.num_devices, *cfg.policy, res);
    row["num_slots"] = cfg.num_slots;
    row["warmup_slots"] = cfg.warmup_slots;
    row["num_replications"] = cfg.num_replications;
    table.add_row(row);
    write_output(table, base_metadata(loaded, "simulate"), cfg.output_format, cfg.output_path);
    return 0;
}

nlohmann::json audit_row(int d, const GridPoint& point, Objective objective, bool is_best) {
    nlohmann::json row;
    row["d"] = d;
    row["stage"] = point.stage;
    policy_columns(point.config, row);
    row["objective"] = objective == Objective::Aaoi ? "aaoi" : "avp";
    row["objective_value"] = point.objective_value;
    row["aaoi"] = point.aaoi;
    row["avp"] = point.avp;
    row["ci_halfwidth_aaoi"] = point.ci_halfwidth_aaoi;
    row["valid"] = point.valid;
    row["error"] = point.error;
    row["is_best"] = is_best;
    return row;
}

std::vector<std::string> audit_columns() {
    std::vector<std::string> cols = {"d", "stage"};
    cols.insert(cols.end(), kPolicyColumns.begin(), kPolicyColumns.end());
    for (const char* c :
         {"objective", "objective_value", "aaoi", "avp", "ci_halfwidth_aaoi", "valid", "error",
          "is_best"})
        cols.push_back(c);
    return cols;
}

void append_audit_rows(Table& table, int d, const OptResult& result, Objective objective) {
    int final_stage = 1;
    for (const GridPoint& point : result.table)
        final_stage = std::max(final_stage, point.stage);
    bool marked = false;
    for (const GridPoint& point : result.table) {
        const bool is_best = !marked && point.stage == final_stage && point.valid &&
                             point.config == result.best_config &&
                             point.objective_value == result.best_objective;
        marked = marked || is_best;
        table.add_row(audit_row(d, point, objective, is_best));
    }
}

int cmd_optimize(const CommonOptions& opt) {
    const LoadedConfig loaded = load(opt);
    const ExperimentConfig& cfg = loaded.cfg;
    if (!cfg.grid)
        throw ConfigError("optimize requires a grid");
    const int d = cfg.d_values.empty() ? cfg.params.num_devices : cfg.d_values.front();
    const ParamGrid grid = resolve_grid(*cfg.grid, d);
    const OptResult result = grid_search(grid, d, cfg.params, effective_threads(opt.threads));

    Table table;
    table.columns = audit_columns();
    append_audit_rows(table, d, result, grid.objective);
    write_output(table, base_metadata(loaded, "optimize"), cfg.output_format, cfg.output_path);
    return 0;
}

int cmd_sweep(const CommonOptions& opt) {
    const LoadedConfig loaded = load(opt);
    const ExperimentConfig& cfg = loaded.cfg;
    if (!cfg.grid)
        throw ConfigError("sweep requires a grid");
    if (cfg.d_values.empty())
        throw ConfigError("sweep requires d_values");

    Table table;
    table.columns = audit_columns();
    for (int d : cfg.d_values) {
        const ParamGrid grid = resolve_grid(*cfg.grid, d);
        const OptResult result = grid_search(grid, d, cfg.params, effective_threads(opt.threads));
        append_audit_rows(table, d, result, grid.objective);
    }
    write_output(table, base_metadata(loaded, "sweep"), cfg.output_format, cfg.output_path);
    return 0;
}

int cmd_analyze(const CommonOptions& opt) {
    const LoadedConfig loaded = load(opt);
    const ExperimentConfig& cfg = loaded.cfg;
    if (!cfg.policy)
        throw ConfigError("analyze requires a policy");
    const dtmc::CoupledSolution sol =
        dtmc::solve_coupled(cfg.params, *cfg.policy, cfg.threshold_form);

    Table table;
    table.columns = {"quantity", "state", "value"};
    const auto scalar = [&table](const char* name, const nlohmann::json& value) {
        table.add_row({{"quantity", name}, {"state", nullptr}, {"value", value}});
    };
    scalar("p_e", sol.p_e);
    scalar("mean_energy", sol.mean_energy);
    scalar("effective_p", sol.effective_p);
    scalar("q", sol.q);
    scalar("fictional_t", sol.fictional_t.value);
    scalar("fictional_t_satisfiable", sol.fictional_t.satisfiable);
    scalar("analytical_aaoi", sol.aaoi);
    scalar("energy_solver", sol.energy_dist.method);
    scalar("energy_residual", sol.energy_dist.residual);
    scalar("aoi_solver", sol.aoi_dist.method);
    scalar("aoi_residual", sol.aoi_dist.residual);
    for (size_t i = 0; i < sol.energy_dist.probs.size(); ++i)
        table.add_row({{"quantity", "energy_dist"},
                       {"state", sol.energy_dist.first_state + static_cast<int>(i)},
                       {"value", sol.energy_dist.probs[i]}});
    for (size_t i = 0; i < sol.aoi_dist.probs.size(); ++i)
        table.add_row({{"quantity", "aoi_dist"},
                       {"state", sol.aoi_dist.first_state + static_cast<int>(i)},
                       {"value", sol.aoi_dist.probs[i]}});
    write_output(table, base_metadata(loaded, "analyze"), cfg.output_format, cfg.output_path);
    return 0;
}

void write_plotdata(const ExperimentConfig& cfg, const Table& rows, const Metadata& metadata) {
    namespace fs = std::filesystem;
    const fs::path dir =
        cfg.output_path == "-" ? fs::path(".") : fs::path(cfg.output_path).parent_path();

    std::vector<std::string> labels;
    for (const CompareEntry& e : cfg.compare_entries)
        labels.push_back(e.label);

    const auto cell = [&](int d, const std::string& label,
                          const char* field) -> nlohmann::json {
        for (const nlohmann::json& row : rows.rows)
            if (row.at("d") == d && row.at("label") == label)
                return row.at(field);
        return nullptr;
    };

    const auto wide_table = [&](const std::vector<std::string>& fields) {
        Table t;
        t.columns = {"d"};
        for (const std::string& label : labels)
            for (const std::string& f : fields)
                t.columns.push_back(fields.size() == 1 ? label : f + "_" + label);
        for (int d : cfg.d_values) {
            nlohmann::json row;
            row["d"] = d;
            for (const std::string& label : labels)
                for (const std::string& f : fields)
                    row[fields.size() == 1 ? label : f + "_" + label] =
                        cell(d, label, f.c_str());
            t.add_row(row);
        }
        return t;
    };

    const auto emit = [&](const std::string& name, const Table& t) {
        const fs::path path = dir.empty() ? fs::path(name) : dir / name;
        write_output(t, metadata, OutputFormat::Csv, path.string());
    };

    if (cfg.figure == "fig5") {
        emit("fig5_aaoi.csv", wide_table({"aaoi"}));
        emit("fig5_avp.csv", wide_table({"avp"}));
    } else {
        emit(cfg.figure + ".csv", wide_table({"aaoi", "avp"}));
    }
}

int cmd_compare(const CommonOptions& opt) {
    const LoadedConfig loaded = load(opt);
    const ExperimentConfig& cfg = loaded.cfg;
    if (cfg.compare_entries.size() < 2)
        throw ConfigError("compare requires at least 2 policy entries");
    if (cfg.d_values.empty())
        throw ConfigError("compare requires d_values");
    const int threads = effective_threads(opt.threads);

    Table table;
    table.columns = {"d", "label"};
    const auto res_cols = result_columns();
    table.columns.insert(table.columns.end(), res_cols.begin() + 1, res_cols.end());

    for (int d : cfg.d_values) {
        for (const CompareEntry& entry : cfg.compare_entries) {
            PolicyConfig policy;
            if (entry.fixed) {
                policy = *entry.fixed;
            } else if (entry.grid) {
                const ParamGrid grid = resolve_grid(*entry.grid, d);
                policy = grid_search(grid, d, cfg.params, threads).best_config;
            } else {
                const auto it = entry.per_d.find(d);
                if (it == entry.per_d.end())
                    throw ConfigError("compare entry '" + entry.label +
                                      "' has no policy for d=" + std::to_string(d));
                policy = it->second;
            }
            // All entries share the master seed, so comparisons at each D use
            // common random numbers.
            const SimResult res =
                run_simulation(sim_config_for(cfg, policy, d), threads);
            nlohmann::json row = result_row(d, policy, res);
            row["label"] = entry.label;
            table.add_row(row);
        }
    }
    const Metadata metadata = base_metadata(loaded, "compare");
    write_output(table, metadata, cfg.output_format, cfg.output_path);
    if (opt.emit_plotdata) {
        if (cfg.figure.empty())
            throw ConfigError("--emit-plotdata requires a figure field in the config");
        write_plotdata(cfg, table, metadata);
    }
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Slot-synchronous simulator and DTMC toolkit for energy-harvesting "
                 "random access with age-of-information metrics"};
    app.require_subcommand(1);

    CommonOptions opt;
    int (*handler)(const CommonOptions&) = nullptr;

    const auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "experiment config (JSON)")
            ->required();
        sub->add_option("--seed", opt.seed, "override sim.seed");
        sub->add_option("--threads", opt.threads, "worker threads (default: all cores)");
        sub->add_option("--output", opt.output, "override output.path ('-' = stdout)");
        sub->add_option("--format", opt.format, "override output.format (csv|json)")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run one policy at one network size");
    add_common(simulate);
    simulate->callback([&]() { handler = &cmd_simulate; });

    CLI::App* sweep = app.add_subcommand("sweep", "optimize a policy family per device count");
    add_common(sweep);
    sweep->callback([&]() { handler = &cmd_sweep; });

    CLI::App* optimize = app.add_subcommand("optimize", "grid search at one network size");
    add_common(optimize);
    optimize->callback([&]() { handler = &cmd_optimize; });

    CLI::App* analyze = app.add_subcommand("analyze", "stationary chain analysis");
    add_common(analyze);
    analyze->callback([&]() { handler = &cmd_analyze; });

    CLI::App* compare = app.add_subcommand("compare", "evaluate several policies per D");
    add_common(compare);
    compare->add_flag("--emit-plotdata", opt.emit_plotdata,
                      "also write per-figure CSVs next to the output file");
    compare->callback([&]() { handler = &cmd_compare; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        return handler(opt);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace aoisim::cli
