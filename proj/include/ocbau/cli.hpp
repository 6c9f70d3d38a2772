#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ocbau/core.hpp"
#include "ocbau/instance_json.hpp"
#include "ocbau/oracle.hpp"
#include "ocbau/rate.hpp"
#include "ocbau/simulate.hpp"

namespace ocbau {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitIo = 4;

/// Full 17-significant-digit decimal, enough to round-trip any double.
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline void write_text(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw IoError("failed writing output file '" + path + "'");
}

/// Minimal CSV table: plain numeric/token cells, no quoting needed.
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> row) {
        if (row.size() != header_.size()) throw IoError("CSV row width mismatch");
        rows_.push_back(std::move(row));
    }

    std::string to_string() const {
        std::ostringstream out;
        emit(out, header_);
        for (const auto& row : rows_) emit(out, row);
        return out.str();
    }

  private:
    static void emit(std::ostringstream& out, const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) out << ',';
            out << cells[c];
        }
        out << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

namespace detail {

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid JSON in '" + path + "': " + e.what());
    }
}

// Layer a JSON config under command-line flags: any option the user did not
// pass on the command line takes its value from the config file when present.
template <typename T>
void merge_option(const nlohmann::json& cfg, const CLI::App& sub, const std::string& flag,
                  const std::string& key, T& value) {
    if (!cfg.contains(key) || sub.count("--" + flag) > 0) return;
    try {
        value = cfg.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config field '" + key + "': " + e.what());
    }
}

struct InstanceSelection {
    int builtin = 0; // 1..6, or 0 when a file is given
    int k = 10;
    std::string file;

    ProblemInstance resolve() const {
        if (!file.empty()) return instance_from_json(load_json_file(file));
        if (builtin >= 1 && builtin <= 6) return make_builtin_instance(builtin, k);
        throw ConfigError("select an instance with --instance 1..6 or --instance-file");
    }
};

inline void add_instance_options(CLI::App* sub, InstanceSelection& sel) {
    sub->add_option("--instance", sel.builtin, "Built-in instance id (1..6)");
    sub->add_option("--k", sel.k, "Design count for built-in instances 1..4 (default 10)");
    sub->add_option("--instance-file", sel.file,
                    "JSON file with {\"means\": [...], \"variances\": [...]}");
}

inline void merge_instance(const nlohmann::json& cfg, const CLI::App& sub, InstanceSelection& sel) {
    merge_option(cfg, sub, "instance", "instance", sel.builtin);
    merge_option(cfg, sub, "k", "k", sel.k);
    merge_option(cfg, sub, "instance-file", "instance_file", sel.file);
}

inline std::vector<PolicyKind> parse_policies(const std::vector<std::string>& names) {
    std::vector<PolicyKind> out;
    for (const std::string& n : names) {
        if (n == "all") {
            return {PolicyKind::OcbaU, PolicyKind::OcbaK, PolicyKind::ExpectedImprovement,
                    PolicyKind::Equal};
        }
        out.push_back(parse_policy(n));
    }
    if (out.empty()) throw ConfigError("at least one policy is required");
    return out;
}

inline std::uint64_t default_seed() {
    if (const char* env = std::getenv("OCBAU_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') throw ConfigError("OCBAU_SEED must be an unsigned integer");
        return v;
    }
    return 0;
}

} // namespace detail

/// `oracle`: the four benchmark allocations side by side. Non-best rows carry
/// each allocation's pairwise rate for that design; the best-design row
/// carries the allocation's overall rate (the minimum over the others).
inline int cmd_oracle(const detail::InstanceSelection& sel, double tol, const std::string& output,
                      const std::string& format) {
    const ProblemInstance inst = sel.resolve();
    const OracleSolution opt = optimal_allocation(inst, tol);
    const OracleSolution known = known_variance_allocation(inst, tol);
    const Allocation ocba = ocba_approx_allocation(inst);
    const Allocation equal = Allocation::equal(inst.k());

    const int best = inst.best();
    const auto pair_rate = [&](const Allocation& a, int i) {
        return (i == best) ? min_pair_rate(a, inst)
                           : v_rate(a[i], a[best], pair_against_best(inst, i));
    };

    if (format == "json") {
        nlohmann::json j;
        j["instance"] = instance_to_json(inst);
        j["best"] = best + 1;
        j["alpha_opt"] = opt.alloc.values();
        j["alpha_known"] = known.alloc.values();
        j["alpha_ocba"] = ocba.values();
        j["alpha_equal"] = equal.values();
        j["rate_opt"] = opt.rate;
        j["rate_known"] = known.rate;
        j["rate_ocba"] = min_pair_rate(ocba, inst);
        j["rate_equal"] = min_pair_rate(equal, inst);
        j["glynn_rate_known"] = glynn_rate(known.alloc, inst);
        j["diagnostics"] = {{"balance_residual", opt.diag.balance_residual},
                            {"s_min", opt.diag.s_min},
                            {"s_max", opt.diag.s_max},
                            {"degenerate", opt.diag.degenerate}};
        write_text(output, j.dump(2) + "\n");
        return kExitOk;
    }

    CsvTable table({"design", "alpha_opt", "alpha_known", "alpha_ocba", "alpha_equal", "v_opt",
                    "v_known", "v_ocba", "v_equal"});
    for (int i = 0; i < inst.k(); ++i) {
        table.add_row({std::to_string(i + 1), fmt(opt.alloc[i]), fmt(known.alloc[i]), fmt(ocba[i]),
                       fmt(equal[i]), fmt(pair_rate(opt.alloc, i)), fmt(pair_rate(known.alloc, i)),
                       fmt(pair_rate(ocba, i)), fmt(pair_rate(equal, i))});
    }
    write_text(output, table.to_string());
    return kExitOk;
}

/// `run`: Monte Carlo experiment, long-format summary. Rows carry one metric
/// per line: pfs_bayes/pfs_freq per checkpoint, alpha_<i> at the final budget.
inline int cmd_run(const ExperimentConfig& cfg, const std::string& output,
                   const std::string& format, const std::string& trajectory_path) {
    std::vector<std::vector<Trajectory>> trajectories;
    const MacroSummary summary =
        run_macroreps(cfg, trajectory_path.empty() ? nullptr : &trajectories);

    if (!trajectory_path.empty()) {
        std::ostringstream lines;
        for (std::size_t p = 0; p < summary.policies.size(); ++p)
            for (std::size_t rep = 0; rep < trajectories[p].size(); ++rep)
                lines << trajectory_to_json(trajectories[p][rep], to_string(summary.policies[p]),
                                            static_cast<int>(rep))
                             .dump()
                      << '\n';
        write_text(trajectory_path, lines.str());
    }

    if (format == "json") {
        nlohmann::json j;
        j["checkpoints"] = summary.checkpoints;
        nlohmann::json pols = nlohmann::json::array();
        for (std::size_t p = 0; p < summary.policies.size(); ++p) {
            nlohmann::json jp;
            jp["policy"] = to_string(summary.policies[p]);
            for (std::size_t c = 0; c < summary.checkpoints.size(); ++c) {
                jp["pfs_bayes"].push_back(
                    {{"mean", summary.pfs_bayes[p][c].mean}, {"se", summary.pfs_bayes[p][c].se}});
                jp["pfs_freq"].push_back(
                    {{"mean", summary.pfs_freq[p][c].mean}, {"se", summary.pfs_freq[p][c].se}});
            }
            for (const MetricStats& a : summary.final_alpha[p])
                jp["final_alpha"].push_back({{"mean", a.mean}, {"se", a.se}});
            pols.push_back(std::move(jp));
        }
        j["policies"] = std::move(pols);
        write_text(output, j.dump(2) + "\n");
        return kExitOk;
    }

    CsvTable table({"policy", "checkpoint", "metric", "mean", "se"});
    for (std::size_t p = 0; p < summary.policies.size(); ++p) {
        const std::string name = to_string(summary.policies[p]);
        for (std::size_t c = 0; c < summary.checkpoints.size(); ++c) {
            const std::string ck = std::to_string(summary.checkpoints[c]);
            table.add_row({name, ck, "pfs_bayes", fmt(summary.pfs_bayes[p][c].mean),
                           fmt(summary.pfs_bayes[p][c].se)});
            table.add_row({name, ck, "pfs_freq", fmt(summary.pfs_freq[p][c].mean),
                           fmt(summary.pfs_freq[p][c].se)});
        }
        const std::string final_ck = std::to_string(summary.checkpoints.back());
        for (std::size_t i = 0; i < summary.final_alpha[p].size(); ++i)
            table.add_row({name, final_ck, "alpha_" + std::to_string(i + 1),
                           fmt(summary.final_alpha[p][i].mean), fmt(summary.final_alpha[p][i].se)});
    }
    write_text(output, table.to_string());
    return kExitOk;
}

struct RateDumpOptions {
    double mu_i = 0.0;
    double var_i = 1.0;
    double mu_star = 10.0;
    double var_star = 1.0;
    std::vector<double> curve_r;
    int phi_points = 401;
    double sweep_start = -1.0;
    double sweep_stop = -1.0;
    double sweep_step = -1.0;
    std::string curves_out = "-";
    std::string sweep_out = "-";
};

/// `rate-dump`: (phi, g) curves for chosen ratios plus a
/// (r, phi_min, phi_max, W) sweep over a ratio range.
inline int cmd_rate_dump(const RateDumpOptions& opt) {
    const PairParams p(opt.mu_i, opt.var_i, opt.mu_star, opt.var_star);

    if (!opt.curve_r.empty()) {
        if (opt.phi_points < 2) throw ConfigError("--phi-points must be at least 2");
        CsvTable curves({"r", "phi", "g"});
        for (double r : opt.curve_r) {
            if (!(r >= 0.0)) throw ConfigError("curve r values must be nonnegative");
            for (int s = 0; s < opt.phi_points; ++s) {
                const double phi = p.mu_i + p.gap() * static_cast<double>(s) /
                                                static_cast<double>(opt.phi_points - 1);
                curves.add_row({fmt(r), fmt(phi), fmt(g_value(phi, r, p))});
            }
        }
        write_text(opt.curves_out, curves.to_string());
    }

    if (opt.sweep_step > 0.0) {
        if (opt.sweep_start < 0.0 || opt.sweep_stop < opt.sweep_start)
            throw ConfigError("sweep range must satisfy 0 <= start <= stop");
        CsvTable sweep({"r", "phi_min", "phi_max", "w", "degenerate"});
        for (double r = opt.sweep_start; r <= opt.sweep_stop + 1e-12; r += opt.sweep_step) {
            const MinimizerPair mp = phi_minimizers(r, p);
            sweep.add_row({fmt(r), fmt(mp.phi_min), fmt(mp.phi_max), fmt(mp.w_value),
                           mp.is_degenerate ? "1" : "0"});
        }
        write_text(opt.sweep_out, sweep.to_string());
    }

    if (opt.curve_r.empty() && opt.sweep_step <= 0.0)
        throw ConfigError("rate-dump requires --r values and/or --sweep start:stop:step");
    return kExitOk;
}

/// `compare`: runs the experiment inline and reports, per policy, the
/// sup-norm distance between the mean final proportions and the optimal
/// allocation, plus the final PFS metrics.
inline int cmd_compare(const ExperimentConfig& cfg, double tol, const std::string& output,
                       const std::string& format) {
    const OracleSolution opt = optimal_allocation(cfg.instance, tol);
    const MacroSummary summary = run_macroreps(cfg);
    const std::size_t last = summary.checkpoints.size() - 1;

    std::vector<double> distance(summary.policies.size(), 0.0);
    for (std::size_t p = 0; p < summary.policies.size(); ++p)
        for (int i = 0; i < cfg.instance.k(); ++i)
            distance[p] =
                std::max(distance[p], std::abs(summary.final_alpha[p][i].mean - opt.alloc[i]));

    if (format == "json") {
        nlohmann::json j;
        j["alpha_opt"] = opt.alloc.values();
        j["budget"] = cfg.budget;
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t p = 0; p < summary.policies.size(); ++p) {
            rows.push_back({{"policy", to_string(summary.policies[p])},
                            {"alpha_distance", distance[p]},
                            {"pfs_bayes", summary.pfs_bayes[p][last].mean},
                            {"pfs_bayes_se", summary.pfs_bayes[p][last].se},
                            {"pfs_freq", summary.pfs_freq[p][last].mean},
                            {"pfs_freq_se", summary.pfs_freq[p][last].se}});
        }
        j["policies"] = std::move(rows);
        write_text(output, j.dump(2) + "\n");
        return kExitOk;
    }

    CsvTable table(
        {"policy", "alpha_distance", "pfs_bayes", "pfs_bayes_se", "pfs_freq", "pfs_freq_se"});
    for (std::size_t p = 0; p < summary.policies.size(); ++p)
        table.add_row({to_string(summary.policies[p]), fmt(distance[p]),
                       fmt(summary.pfs_bayes[p][last].mean), fmt(summary.pfs_bayes[p][last].se),
                       fmt(summary.pfs_freq[p][last].mean), fmt(summary.pfs_freq[p][last].se)});
    write_text(output, table.to_string());
    return kExitOk;
}

/// Entry point shared by the binary and the tests. args excludes the program
/// name. Exit codes: 0 success, 2 configuration error, 3 solver error,
/// 4 I/O error.
inline int run(std::vector<std::string> args) {
    CLI::App app{"Simulation-budget allocation for ranking and selection with unknown variances"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; command-line flags override it");

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "Solve the benchmark allocations");
    detail::InstanceSelection oracle_sel;
    detail::add_instance_options(oracle_cmd, oracle_sel);
    double oracle_tol = 1e-9;
    std::string oracle_out = "-", oracle_fmt = "csv";
    oracle_cmd->add_option("--tol", oracle_tol, "Balance residual tolerance");
    oracle_cmd->add_option("-o,--output", oracle_out, "Output path or - for stdout");
    oracle_cmd->add_option("--format", oracle_fmt)->check(CLI::IsMember({"csv", "json"}));

    // run
    auto* run_cmd = app.add_subcommand("run", "Run the Monte Carlo experiment harness");
    detail::InstanceSelection run_sel;
    detail::add_instance_options(run_cmd, run_sel);
    std::vector<std::string> run_policies{"all"};
    long long run_budget = 2000;
    int run_n0 = 3;
    std::vector<long long> run_checkpoints;
    int run_reps = 1000;
    long long run_pfs_samples = 250000;
    std::uint64_t run_seed = 0;
    int run_threads = 0;
    bool run_crn = false;
    std::string run_out = "-", run_fmt = "csv", run_traj;
    run_cmd->add_option("--policies", run_policies, "Comma-separated policies or 'all'")
        ->delimiter(',');
    run_cmd->add_option("--budget", run_budget, "Total simulation budget per replication");
    run_cmd->add_option("--n0", run_n0, "Initial replications per design");
    run_cmd->add_option("--checkpoints", run_checkpoints, "Budgets at which PFS is estimated")
        ->delimiter(',');
    run_cmd->add_option("--reps", run_reps, "Macroreplication count R");
    run_cmd->add_option("--pfs-samples", run_pfs_samples, "Posterior draws M per PFS estimate");
    auto* run_seed_opt = run_cmd->add_option("--seed", run_seed, "Base seed (env OCBAU_SEED)");
    run_cmd->add_option("--threads", run_threads, "Worker threads (0 = hardware)");
    run_cmd->add_flag("--crn", run_crn, "Share observation streams across policies");
    run_cmd->add_option("--trajectories", run_traj, "Optional JSON-lines trajectory dump path");
    run_cmd->add_option("-o,--output", run_out, "Output path or - for stdout");
    run_cmd->add_option("--format", run_fmt)->check(CLI::IsMember({"csv", "json"}));

    // rate-dump
    auto* rate_cmd = app.add_subcommand("rate-dump", "Dump inner-problem curves and sweeps");
    RateDumpOptions rate_opt;
    std::string rate_sweep_spec, rate_out = "-";
    rate_cmd->add_option("--mu-i", rate_opt.mu_i, "Non-best mean");
    rate_cmd->add_option("--var-i", rate_opt.var_i, "Non-best variance");
    rate_cmd->add_option("--mu-star", rate_opt.mu_star, "Best mean");
    rate_cmd->add_option("--var-star", rate_opt.var_star, "Best variance");
    rate_cmd->add_option("--r", rate_opt.curve_r, "Ratios for (phi, g) curves")->delimiter(',');
    rate_cmd->add_option("--phi-points", rate_opt.phi_points, "Grid points per curve");
    rate_cmd->add_option("--sweep", rate_sweep_spec, "Ratio sweep start:stop:step");
    rate_cmd->add_option("-o,--output", rate_out, "Output path or - for stdout");
    rate_cmd->add_option("--curves-out", rate_opt.curves_out, "Curve table output (default -o)");
    rate_cmd->add_option("--sweep-out", rate_opt.sweep_out, "Sweep table output (default -o)");

    // compare
    auto* cmp_cmd = app.add_subcommand("compare", "Compare learned allocations against the oracle");
    detail::InstanceSelection cmp_sel;
    detail::add_instance_options(cmp_cmd, cmp_sel);
    std::vector<std::string> cmp_policies{"all"};
    long long cmp_budget = 2000;
    int cmp_n0 = 3;
    int cmp_reps = 200;
    long long cmp_pfs_samples = 10000;
    std::uint64_t cmp_seed = 0;
    int cmp_threads = 0;
    double cmp_tol = 1e-9;
    std::string cmp_out = "-", cmp_fmt = "csv";
    cmp_cmd->add_option("--policies", cmp_policies)->delimiter(',');
    cmp_cmd->add_option("--budget", cmp_budget);
    cmp_cmd->add_option("--n0", cmp_n0);
    cmp_cmd->add_option("--reps", cmp_reps);
    cmp_cmd->add_option("--pfs-samples", cmp_pfs_samples);
    auto* cmp_seed_opt = cmp_cmd->add_option("--seed", cmp_seed, "Base seed (env OCBAU_SEED)");
    cmp_cmd->add_option("--threads", cmp_threads);
    cmp_cmd->add_option("--tol", cmp_tol);
    cmp_cmd->add_option("-o,--output", cmp_out, "Output path or - for stdout");
    cmp_cmd->add_option("--format", cmp_fmt)->check(CLI::IsMember({"csv", "json"}));

    try {
        std::vector<const char*> argv;
        argv.push_back("ocbau");
        for (const std::string& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());

        nlohmann::json cfg = nlohmann::json::object();
        if (!config_path.empty()) cfg = detail::load_json_file(config_path);

        if (oracle_cmd->parsed()) {
            detail::merge_instance(cfg, *oracle_cmd, oracle_sel);
            detail::merge_option(cfg, *oracle_cmd, "tol", "tol", oracle_tol);
            detail::merge_option(cfg, *oracle_cmd, "output", "output", oracle_out);
            detail::merge_option(cfg, *oracle_cmd, "format", "format", oracle_fmt);
            return cmd_oracle(oracle_sel, oracle_tol, oracle_out, oracle_fmt);
        }

        if (run_cmd->parsed()) {
            detail::merge_instance(cfg, *run_cmd, run_sel);
            detail::merge_option(cfg, *run_cmd, "policies", "policies", run_policies);
            detail::merge_option(cfg, *run_cmd, "budget", "budget", run_budget);
            detail::merge_option(cfg, *run_cmd, "n0", "n0", run_n0);
            detail::merge_option(cfg, *run_cmd, "checkpoints", "checkpoints", run_checkpoints);
            detail::merge_option(cfg, *run_cmd, "reps", "reps", run_reps);
            detail::merge_option(cfg, *run_cmd, "pfs-samples", "pfs_samples", run_pfs_samples);
            detail::merge_option(cfg, *run_cmd, "seed", "seed", run_seed);
            detail::merge_option(cfg, *run_cmd, "threads", "threads", run_threads);
            detail::merge_option(cfg, *run_cmd, "crn", "crn", run_crn);
            detail::merge_option(cfg, *run_cmd, "output", "output", run_out);
            detail::merge_option(cfg, *run_cmd, "format", "format", run_fmt);
            detail::merge_option(cfg, *run_cmd, "trajectories", "trajectories", run_traj);
            if (run_seed_opt->count() == 0 && !cfg.contains("seed")) run_seed = detail::default_seed();
            ExperimentConfig ecfg{run_sel.resolve(),
                                  detail::parse_policies(run_policies),
                                  run_budget,
                                  run_n0,
                                  run_checkpoints.empty() ? std::vector<long long>{run_budget}
                                                          : run_checkpoints,
                                  run_reps,
                                  run_pfs_samples,
                                  run_seed,
                                  run_threads,
                                  run_crn};
            return cmd_run(ecfg, run_out, run_fmt, run_traj);
        }

        if (rate_cmd->parsed()) {
            detail::merge_option(cfg, *rate_cmd, "mu-i", "mu_i", rate_opt.mu_i);
            detail::merge_option(cfg, *rate_cmd, "var-i", "var_i", rate_opt.var_i);
            detail::merge_option(cfg, *rate_cmd, "mu-star", "mu_star", rate_opt.mu_star);
            detail::merge_option(cfg, *rate_cmd, "var-star", "var_star", rate_opt.var_star);
            detail::merge_option(cfg, *rate_cmd, "r", "r", rate_opt.curve_r);
            detail::merge_option(cfg, *rate_cmd, "phi-points", "phi_points", rate_opt.phi_points);
            detail::merge_option(cfg, *rate_cmd, "sweep", "sweep", rate_sweep_spec);
            detail::merge_option(cfg, *rate_cmd, "output", "output", rate_out);
            if (!rate_sweep_spec.empty()) {
                double a = 0.0, b = 0.0, s = 0.0;
                if (std::sscanf(rate_sweep_spec.c_str(), "%lf:%lf:%lf", &a, &b, &s) != 3)
                    throw ConfigError("--sweep expects start:stop:step");
                rate_opt.sweep_start = a;
                rate_opt.sweep_stop = b;
                rate_opt.sweep_step = s;
            }
            if (rate_cmd->count("--curves-out") == 0) rate_opt.curves_out = rate_out;
            if (rate_cmd->count("--sweep-out") == 0) rate_opt.sweep_out = rate_out;
            return cmd_rate_dump(rate_opt);
        }

        if (cmp_cmd->parsed()) {
            detail::merge_instance(cfg, *cmp_cmd, cmp_sel);
            detail::merge_option(cfg, *cmp_cmd, "policies", "policies", cmp_policies);
            detail::merge_option(cfg, *cmp_cmd, "budget", "budget", cmp_budget);
            detail::merge_option(cfg, *cmp_cmd, "n0", "n0", cmp_n0);
            detail::merge_option(cfg, *cmp_cmd, "reps", "reps", cmp_reps);
            detail::merge_option(cfg, *cmp_cmd, "pfs-samples", "pfs_samples", cmp_pfs_samples);
            detail::merge_option(cfg, *cmp_cmd, "seed", "seed", cmp_seed);
            detail::merge_option(cfg, *cmp_cmd, "threads", "threads", cmp_threads);
            detail::merge_option(cfg, *cmp_cmd, "tol", "tol", cmp_tol);
            detail::merge_option(cfg, *cmp_cmd, "output", "output", cmp_out);
            detail::merge_option(cfg, *cmp_cmd, "format", "format", cmp_fmt);
            if (cmp_seed_opt->count() == 0 && !cfg.contains("seed")) cmp_seed = detail::default_seed();
            ExperimentConfig ecfg{cmp_sel.resolve(),
                                  detail::parse_policies(cmp_policies),
                                  cmp_budget,
                                  cmp_n0,
                                  std::vector<long long>{cmp_budget},
                                  cmp_reps,
                                  cmp_pfs_samples,
                                  cmp_seed,
                                  cmp_threads,
                                  false};
            return cmd_compare(ecfg, cmp_tol, cmp_out, cmp_fmt);
        }

        throw ConfigError("no subcommand selected");
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const EstimationError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }
}

} // namespace cli
} // namespace ocbau
