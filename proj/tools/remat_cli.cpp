// SPDX-License-Identifier: Apache-2.0
//
// remat: solve, inspect and compare checkpointing schedules.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "remat/remat.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRange = 3;
constexpr int kExitCapacity = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool cap_overridden() { return std::getenv("REMAT_MAX_T") != nullptr; }

int solver_cap() {
    const char* env = std::getenv("REMAT_MAX_T");
    if (!env) return remat::default_max_t();
    try {
        const int v = std::stoi(env);
        if (v < 1) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw UsageError(std::string("REMAT_MAX_T must be a positive integer, got '") + env + "'");
    }
}

void check_capacity(const char* what, long long v) {
    const int cap = solver_cap();
    if (v > cap) {
        throw remat::LimitError(std::string(what) + " = " + std::to_string(v) + " exceeds the solver cap of " +
                                std::to_string(cap) + "; set REMAT_MAX_T to raise it");
    }
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

remat::Algorithm pick_algorithm(const std::string& alg, bool dedup) {
    if (alg == "hsm") return remat::Algorithm::hsm;
    if (alg == "ism") return remat::Algorithm::ism;
    return dedup ? remat::Algorithm::msm_dedup : remat::Algorithm::msm;
}

remat::PolicyTable build(remat::Algorithm alg, int t, int m, int alpha, int beta) {
    if (t < 1) throw UsageError("--t must be >= 1");
    if (m < 1) throw UsageError("--m must be >= 1");
    check_capacity("t", t);
    check_capacity("m", m);
    remat::CostModel model{alpha, beta, 2.0};
    if (remat::is_mixed(alg)) model.validate();
    return remat::solve(remat::SolveRequest{alg, t, m, model});
}

struct ModelFlags {
    int alpha = 2;
    int beta = 1;
    bool dedup = false;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
    cmd->add_option("--alpha", f.alpha, "internal state size in hidden units")->capture_default_str();
    cmd->add_option("--beta", f.beta, "internal state size without its input hidden state")->capture_default_str();
    cmd->add_flag("--dedup", f.dedup, "store internal states without their input hidden state");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Memory-budgeted checkpointing schedules for backpropagation through time"};
    app.require_subcommand(1);

    // solve
    std::string s_alg;
    int s_t = 0, s_m = 0;
    ModelFlags s_model;
    std::string s_out;
    auto* solve = app.add_subcommand("solve", "build a policy table and write it as JSON");
    solve->add_option("--alg", s_alg, "algorithm")->required()->check(CLI::IsMember({"hsm", "ism", "msm"}));
    solve->add_option("--t", s_t, "largest sequence length")->required();
    solve->add_option("--m", s_m, "largest memory budget")->required();
    add_model_flags(solve, s_model);
    solve->add_option("-o,--output", s_out, "output file (default: stdout)");

    // simulate
    std::string sim_file, sim_events;
    int sim_t = 0, sim_m = 0;
    double sim_ratio = 2.0;
    auto* simulate = app.add_subcommand("simulate", "dry-run a policy and report its operation counts");
    simulate->add_option("policy", sim_file, "policy JSON file")->required();
    simulate->add_option("--t", sim_t, "sequence length")->required();
    simulate->add_option("--m", sim_m, "memory budget")->required();
    simulate->add_option("--backward-ratio", sim_ratio, "cost of a backward step in forwards")->capture_default_str();
    simulate->add_option("--events", sim_events, "write the event list as CSV");

    // curves
    std::string c_figure, c_out;
    remat::CurveRequest creq;
    auto* curves = app.add_subcommand("curves", "emit CSV data for a cost/memory figure");
    curves->add_option("--figure", c_figure, "figure")
        ->required()
        ->check(CLI::IsMember({"hsm_cost", "ism_cost", "msm_cost", "strategy_compare", "chen_memory_ratio",
                               "chen_cost_fixed_memory"}));
    curves->add_option("--t-min", creq.t_min)->capture_default_str();
    curves->add_option("--t-max", creq.t_max)->capture_default_str();
    curves->add_option("--t-step", creq.t_step)->capture_default_str();
    curves->add_option("--m", creq.m_list, "memory values, comma separated")->delimiter(',');
    curves->add_option("--alpha", creq.alpha)->capture_default_str();
    curves->add_option("--beta", creq.beta)->capture_default_str();
    curves->add_option("--betas", creq.beta_list, "beta values for the Chen figures")->delimiter(',');
    curves->add_flag("--dedup", creq.dedup);
    curves->add_option("--backward-ratio", creq.backward_ratio)->capture_default_str();
    curves->add_option("-o,--output", c_out, "output file (default: stdout)");

    // compare-chen
    std::vector<int> cc_t{16, 64, 256, 1024};
    int cc_beta = 5;
    std::string cc_out;
    auto* cchen = app.add_subcommand("compare-chen", "compare the sqrt(t) schedule with the optimal policy");
    cchen->add_option("--t", cc_t, "sequence lengths, comma separated")->delimiter(',')->capture_default_str();
    cchen->add_option("--beta", cc_beta)->capture_default_str();
    cchen->add_option("-o,--output", cc_out, "output file (default: stdout)");

    // hetero
    std::string h_file;
    int h_m = 0;
    bool h_force = false;
    auto* hetero = app.add_subcommand("hetero", "solve a heterogeneous chain");
    hetero->add_option("chain", h_file, "chain JSON file")->required();
    hetero->add_option("--m", h_m, "memory budget")->required();
    hetero->add_flag("--force", h_force, "build even beyond the layer cap");

    // oracle
    std::string o_alg;
    int o_t = 0, o_m = 0;
    ModelFlags o_model;
    bool o_relax = false;
    auto* oracle = app.add_subcommand("oracle", "exhaustive search for the optimal forward count");
    oracle->add_option("--alg", o_alg)->required()->check(CLI::IsMember({"hsm", "ism", "msm"}));
    oracle->add_option("--t", o_t)->required();
    oracle->add_option("--m", o_m)->required();
    add_model_flags(oracle, o_model);
    oracle->add_flag("--relax-lifo", o_relax, "allow checkpoints to be released out of order");

    // bounds
    std::string b_alg;
    int b_t = 0, b_m = 0;
    ModelFlags b_model;
    auto* bounds = app.add_subcommand("bounds", "check the analytic cost bounds over a table");
    bounds->add_option("--alg", b_alg)->required()->check(CLI::IsMember({"hsm", "ism", "msm"}));
    bounds->add_option("--t", b_t)->required();
    bounds->add_option("--m", b_m)->required();
    add_model_flags(bounds, b_model);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*solve) {
            const auto alg = pick_algorithm(s_alg, s_model.dedup);
            const auto p = build(alg, s_t, s_m, s_model.alpha, s_model.beta);
            write_output(s_out, remat::serialize_policy(p));
            std::cerr << remat::to_string(alg) << " cost(" << s_t << ", " << s_m << ") = " << p.cost(s_t, s_m)
                      << '\n';
        } else if (*simulate) {
            const auto p = remat::deserialize_policy(read_file(sim_file));
            if (!p.covers(sim_t, sim_m)) {
                throw RangeError("(t=" + std::to_string(sim_t) + ", m=" + std::to_string(sim_m) +
                                 ") is outside the policy table (t <= " + std::to_string(p.t_max()) +
                                 ", 1 <= m <= " + std::to_string(p.m_max()) + ")");
            }
            if (sim_ratio < 0) throw UsageError("--backward-ratio must be >= 0");
            const auto tr = remat::trace_execution(p, sim_t, remat::MemoryBudget(sim_m), std::nullopt,
                                                   !sim_events.empty());
            std::cout << "algorithm " << remat::to_string(p.algorithm()) << '\n'
                      << "forwards " << tr.forward_ops << '\n'
                      << "backwards " << tr.backward_ops << '\n'
                      << "peak_memory " << tr.peak_memory_units << '\n'
                      << "simulated_time " << remat::format_fixed(tr.forward_ops + sim_ratio * sim_t) << '\n';
            if (!sim_events.empty()) write_output(sim_events, remat::events_to_csv(tr.events));
        } else if (*curves) {
            creq.figure = remat::parse_figure(c_figure);
            creq.max_t = solver_cap();
            write_output(c_out, remat::curves_to_csv(remat::compute_curves(creq)));
        } else if (*cchen) {
            write_output(cc_out, remat::chen_comparison_to_csv(remat::compare_chen(cc_t, cc_beta, solver_cap())));
        } else if (*hetero) {
            const auto chain = remat::load_chain_spec(h_file);
            remat::HeteroOptions opts;
            opts.force = h_force;
            if (cap_overridden()) opts.max_layers = solver_cap();
            const auto pol = remat::solve_hetero(chain, h_m, opts);
            const int n = chain.size();
            std::cout << "layers " << n << '\n'
                      << "cost " << remat::format_fixed(pol.cost(n, h_m, 0)) << '\n'
                      << "first_checkpoint " << pol.split(n, h_m, 0) << '\n';
        } else if (*oracle) {
            const auto alg = pick_algorithm(o_alg, o_model.dedup);
            remat::OracleOptions opts;
            opts.relax_lifo = o_relax;
            if (o_m < 1 || o_t < 0) throw UsageError("--t must be >= 0 and --m >= 1");
            const auto best = remat::state_space_oracle(o_t, remat::MemoryBudget(o_m),
                                                        remat::CostModel{o_model.alpha, o_model.beta, 2.0}, alg, opts);
            std::cout << remat::to_string(alg) << " optimum(" << o_t << ", " << o_m << ") = " << best << '\n';
        } else if (*bounds) {
            const auto alg = pick_algorithm(b_alg, b_model.dedup);
            const auto p = build(alg, b_t, b_m, b_model.alpha, b_model.beta);
            std::optional<remat::PolicyTable> ref;
            if (alg != remat::Algorithm::hsm) ref = remat::solve_hsm(b_t, b_m);
            const auto v = remat::check_bounds(p, ref ? &*ref : nullptr);
            for (const auto& x : v) {
                std::cout << "violation " << x.bound << " t=" << x.t << " m=" << x.m << " cost=" << x.cost
                          << " limit=" << remat::format_fixed(x.limit) << '\n';
            }
            std::cout << v.size() << " violations\n";
            return v.empty() ? kExitOk : kExitFailure;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const remat::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const remat::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const remat::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const RangeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRange;
    } catch (const remat::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRange;
    } catch (const remat::LimitError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCapacity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}
