// fragcoal: simulation and numerical verification of additive coalescents,
// grid fragmentations and the subordinator change of measure between them.
//
// Subcommands: simulate-coalescent, simulate-fragmentation, density,
// verify-martingale, verify-marginal, verify-pde, classify-spec.
// Every run requires an explicit --seed; outputs are byte-identical for
// identical (config, seed), independent of --workers.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fragcoal/coalescent.hpp"
#include "fragcoal/density.hpp"
#include "fragcoal/excursion.hpp"
#include "fragcoal/measure.hpp"
#include "fragcoal/parallel.hpp"
#include "fragcoal/pde.hpp"
#include "fragcoal/rng.hpp"
#include "fragcoal/stats.hpp"
#include "fragcoal/subordinator.hpp"
#include "fragcoal/version.hpp"

using nlohmann::json;
using namespace fragcoal;

namespace {

// Round-trip-exact decimal formatting (shortest representation).
std::string fmt(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string fmt_u(std::uint64_t v) { return std::to_string(v); }

std::string load_spec_text(const std::string& arg) {
    if (!arg.empty() && arg[0] == '{') return arg;
    std::ifstream in(arg);
    if (!in) throw std::invalid_argument("cannot open spec file '" + arg + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> parse_csv_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument("empty list: '" + text + "'");
    return out;
}

SubordinatorSpec load_spec(const std::string& arg) {
    return SubordinatorSpec::from_json(json::parse(load_spec_text(arg)));
}

struct OutputSink {
    std::optional<std::string> prefix;  // when absent, data goes to stdout

    void write_data(const std::string& extension, const std::string& bytes) const {
        if (!prefix) {
            std::cout << bytes;
            return;
        }
        std::ofstream out(*prefix + extension, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write output file");
        out << bytes;
    }

    // Manifest carries the full config (re-runnable via --config), the library
    // version and the wall time. Data files never include wall time.
    void write_manifest(const json& config, const std::string& data_file,
                        double wall_seconds) const {
        if (!prefix) return;
        json manifest = {{"tool", "fragcoal"},
                         {"version", kVersion},
                         {"config", config},
                         {"output", data_file},
                         {"wall_time_seconds", wall_seconds}};
        std::ofstream out(*prefix + ".manifest.json", std::ios::binary);
        out << manifest.dump(2) << "\n";
    }
};

json spec_to_json(const SubordinatorSpec& spec) {
    json j;
    spec.to_json(j);
    return j;
}

// ---------------------------------------------------------------------------
// subcommand runners; each returns the bytes of the primary data artifact

int run_simulate_coalescent(std::uint64_t n, double t, std::uint64_t replicates,
                            std::uint64_t seed, unsigned workers, const OutputSink& sink,
                            const json& config) {
    const auto start = std::chrono::steady_clock::now();
    RandomStream root = RandomStream::root(seed, "simulate-coalescent");
    std::vector<std::string> blocks(replicates);
    parallel_for(replicates, workers, [&](std::uint64_t r) {
        RandomStream rng = root.substream(r);
        const double duration = t + 0.5 * std::log(static_cast<double>(n));
        std::string rows;
        MassPartition state = MassPartition::monodisperse(n);
        rows += fmt_u(r) + ",0,0," + fmt_u(state.size()) + "," + fmt(state.largest()) + "," +
                fmt(state.second_largest()) + "\n";
        double time = 0.0;
        std::uint64_t event = 0;
        while (state.size() >= 2) {
            auto [holding, next] = coalescent_step(state, rng);
            time += holding;
            if (time > duration) break;
            state = std::move(next);
            ++event;
            rows += fmt_u(r) + "," + fmt_u(event) + "," + fmt(time) + "," +
                    fmt_u(state.size()) + "," + fmt(state.largest()) + "," +
                    fmt(state.second_largest()) + "\n";
        }
        blocks[r] = std::move(rows);
    });
    std::string csv = "replicate,event_index,time,k,largest_mass,second_mass\n";
    for (const auto& b : blocks) csv += b;
    sink.write_data(".csv", csv);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    sink.write_manifest(config, sink.prefix ? *sink.prefix + ".csv" : "-", wall);
    return 0;
}

int run_simulate_fragmentation(double t, std::uint32_t grid, std::uint64_t replicates,
                               std::uint64_t seed, const std::vector<double>& theta,
                               bool sigma_literal, unsigned workers, const OutputSink& sink,
                               const json& config) {
    const auto start = std::chrono::steady_clock::now();
    RandomStream root = RandomStream::root(seed, "simulate-fragmentation");
    const ThetaSequence seq = theta.empty()
                                  ? ThetaSequence::brownian()
                                  : (sigma_literal ? ThetaSequence::with_literal_sigma(theta)
                                                   : ThetaSequence::normalized(theta));
    std::vector<std::string> blocks(replicates);
    parallel_for(replicates, workers, [&](std::uint64_t r) {
        RandomStream rng = root.substream(r);
        const MassPartition p =
            theta.empty() ? sample_brownian_fragmentation(t, grid, rng).partition
                          : sample_theta_fragmentation(seq, t, grid, rng).partition;
        std::string rows;
        for (std::size_t rank = 0; rank < p.size(); ++rank) {
            rows += fmt_u(r) + "," + fmt_u(rank + 1) + "," + fmt(p.masses[rank]) + "\n";
        }
        blocks[r] = std::move(rows);
    });
    std::string csv = "replicate,rank,mass\n";
    for (const auto& b : blocks) csv += b;
    sink.write_data(".csv", csv);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    sink.write_manifest(config, sink.prefix ? *sink.prefix + ".csv" : "-", wall);
    return 0;
}

int run_density(const std::string& what, const SubordinatorSpec& spec, double t,
                const std::vector<double>& xs, std::uint64_t mc, std::uint64_t seed,
                const OutputSink& sink, const json& config) {
    const auto start = std::chrono::steady_clock::now();
    RandomStream root = RandomStream::root(seed, "density");
    RandomStream norm_stream = root.substream(0);
    RandomStream eval_stream = root.substream(1);

    MCEstimate est;
    if (what == "g") {
        if (xs.size() != 1) throw std::invalid_argument("density --what g needs one --x");
        est = eval_g(t, xs[0], spec, mc, eval_stream);
    } else if (what == "h") {
        if (xs.size() != 1) throw std::invalid_argument("density --what h needs one --x");
        WeightEvaluator ev(spec, mc, norm_stream);
        est = ev.fragment_weight(t, xs[0], mc, eval_stream);
    } else if (what == "H") {
        WeightEvaluator ev(spec, mc, norm_stream);
        est = ev.partition_weight(t, MassPartition::from_masses(xs), mc, eval_stream);
    } else if (what == "hn") {
        WeightEvaluator ev(spec, mc, norm_stream);
        est = ev.prefix_weight(t, xs, mc, eval_stream);
    } else if (what == "marginal") {
        if (xs.size() != 1) throw std::invalid_argument("density --what marginal needs one --x");
        WeightEvaluator ev(spec, mc, norm_stream);
        est = ev.first_pick_density(t, xs[0], mc, eval_stream);
    } else {
        throw std::invalid_argument("unknown --what '" + what + "'");
    }

    json report = {{"what", what},     {"spec", spec_to_json(spec)}, {"t", t},
                   {"x", xs},          {"value", est.value},         {"stderr", est.std_err},
                   {"n", est.n}};
    sink.write_data(".json", report.dump(2) + "\n");
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    sink.write_manifest(config, sink.prefix ? *sink.prefix + ".json" : "-", wall);
    return 0;
}

int run_verify_martingale(const SubordinatorSpec& spec, const std::vector<double>& t_list,
                          std::uint32_t grid, std::uint64_t replicates, std::uint64_t mc,
                          std::uint64_t mc_norm, std::uint64_t seed, unsigned workers,
                          const OutputSink& sink, const json& config) {
    const auto start = std::chrono::steady_clock::now();
    RandomStream root = RandomStream::root(seed, "verify-martingale");
    const auto report =
        martingale_check(spec, t_list, grid, replicates, mc, mc_norm, workers, root);

    json points = json::array();
    bool all_within = true;
    for (const auto& pt : report.points) {
        const bool within = std::abs(pt.estimate.value - 1.0) <= 4.0 * pt.estimate.std_err;
        all_within = all_within && within;
        points.push_back({{"t", pt.t},
                          {"value", pt.estimate.value},
                          {"stderr", pt.estimate.std_err},
                          {"n", pt.estimate.n},
                          {"inner_stderr", pt.inner_std_err},
                          {"ess", pt.effective_sample_size},
                          {"min_weight", pt.min_weight},
                          {"within_4_sigma_of_1", within}});
    }
    json out = {{"command", "verify-martingale"},
                {"spec", spec_to_json(spec)},
                {"grid", grid},
                {"replicates", replicates},
                {"mc", mc},
                {"normalizer",
                 {{"value", report.normalizer_ratio.value},
                  {"stderr", report.normalizer_ratio.std_err},
                  {"n", report.normalizer_ratio.n}}},
                {"points", points},
                {"pass", all_within}};
    sink.write_data(".json", out.dump(2) + "\n");
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    sink.write_manifest(config, sink.prefix ? *sink.prefix + ".json" : "-", wall);
    return 0;
}

int run_verify_marginal(double t, std::uint32_t grid, std::uint64_t replicates,
                        std::size_t bins, std::uint64_t seed, unsigned workers,
                        const OutputSink& sink, const json& config) {
    const auto start = std::chrono::steady_clock::now();
    RandomStream root = RandomStream::root(seed, "verify-marginal");
    const auto report = marginal_density_test(t, grid, replicates, bins, workers, root);
    json out = {{"command", "verify-marginal"},
                {"t", t},
                {"grid", grid},
                {"replicates", replicates},
                {"bins", report.bins},
                {"edges", report.edges},
                {"counts", report.counts},
                {"chi_square", report.chi_square},
                {"dof", report.dof},
                {"p_value", report.p_value},
                {"degenerate", report.degenerate},
                {"pass", report.p_value > 1e-3}};
    sink.write_data(".json", out.dump(2) + "\n");
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    sink.write_manifest(config, sink.prefix ? *sink.prefix + ".json" : "-", wall);
    return 0;
}

int run_verify_pde(const SubordinatorSpec& spec, double t, const std::vector<double>& x_list,
                   std::uint64_t mc, double tol, std::uint64_t seed, unsigned workers,
                   const OutputSink& sink, const json& config) {
    const auto start = std::chrono::steady_clock::now();
    RandomStream root = RandomStream::root(seed, "verify-pde");
    json rows = json::array();
    bool all_pass = true;
    for (std::size_t i = 0; i < x_list.size(); ++i) {
        const auto res = pde_residual(t, x_list[i], spec, mc, tol, workers, root.substream(i));
        const double budget = 4.0 * res.std_err + tol;
        const bool pass = std::abs(res.value) <= budget;
        all_pass = all_pass && pass;
        rows.push_back({{"x", x_list[i]},
                        {"residual", res.value},
                        {"stderr", res.std_err},
                        {"quad_err", res.quad_err},
                        {"dt_term", res.dt_term},
                        {"integral_term", res.integral_term},
                        {"budget", budget},
                        {"exploratory", res.exploratory},
                        {"pass", pass}});
    }
    json out = {{"command", "verify-pde"}, {"spec", spec_to_json(spec)}, {"t", t},
                {"mc", mc},                {"tol", tol},                 {"results", rows},
                {"pass", all_pass}};
    sink.write_data(".json", out.dump(2) + "\n");
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    sink.write_manifest(config, sink.prefix ? *sink.prefix + ".json" : "-", wall);
    return 0;
}

int run_classify_spec(const SubordinatorSpec& spec, double delta, double x_max, double tol,
                      const OutputSink& sink, const json& config) {
    const auto start = std::chrono::steady_clock::now();
    const auto verdict = classify_equivalence(spec, delta, x_max, tol);
    json out = {{"command", "classify-spec"},
                {"spec", spec_to_json(spec)},
                {"delta", delta},
                {"x_max", x_max},
                {"tol", tol},
                {"result", to_string(verdict)}};
    sink.write_data(".json", out.dump(2) + "\n");
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    sink.write_manifest(config, sink.prefix ? *sink.prefix + ".json" : "-", wall);
    return 0;
}

json error_json(const std::string& kind, const std::string& message) {
    return json{{"error", kind}, {"message", message}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"additive-coalescent / fragmentation simulation and verification"};
    app.require_subcommand(0, 1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file with {\"command\": ..., knobs}");

    // common knobs, bound per subcommand
    struct Args {
        std::string spec;
        std::string what;
        std::string t_list;
        std::string x_list;
        std::string theta;
        std::string out;
        double t = 1.0;
        double tol = 1e-4;
        double delta = 0.5;
        double x_max = 1e6;
        std::uint64_t n = 256;
        std::uint32_t grid = 1 << 16;
        std::uint64_t replicates = 1000;
        std::uint64_t mc = 10000;
        std::uint64_t mc_norm = 1000000;
        std::uint64_t bins = 20;
        std::uint64_t seed = 0;
        unsigned workers = 1;
        bool sigma_literal = false;
    } a;

    auto add_common = [&](CLI::App* cmd, bool needs_seed = true) {
        if (needs_seed)
            cmd->add_option("--seed", a.seed, "master seed (mandatory)")->required();
        cmd->add_option("--workers", a.workers, "worker threads (default 1)");
        cmd->add_option("--out", a.out, "output path prefix (writes <prefix>.csv/.json + manifest)");
    };

    CLI::App* sim_coal = app.add_subcommand("simulate-coalescent",
                                            "finite-n additive coalescent trajectories");
    sim_coal->add_option("--n", a.n, "initial cluster count")->required();
    sim_coal->add_option("--t", a.t, "time relative to the 1/2 ln n shift")->required();
    sim_coal->add_option("--replicates", a.replicates, "number of trajectories");
    add_common(sim_coal);

    CLI::App* sim_frag = app.add_subcommand("simulate-fragmentation",
                                            "grid fragmentation samples");
    sim_frag->add_option("--t", a.t, "fragmentation time")->required();
    sim_frag->add_option("--grid", a.grid, "grid size N");
    sim_frag->add_option("--replicates", a.replicates, "number of samples");
    sim_frag->add_option("--theta", a.theta, "comma list of jump sizes (default: Brownian)");
    sim_frag->add_flag("--sigma-literal", a.sigma_literal,
                       "use sigma = 1 - sum theta^2 instead of the unit-variance scaling");
    add_common(sim_frag);

    CLI::App* density_cmd = app.add_subcommand("density", "weight/density evaluations");
    density_cmd->add_option("--what", a.what, "g|h|H|hn|marginal")->required();
    density_cmd->add_option("--spec", a.spec, "subordinator spec (inline JSON or file)")
        ->required();
    density_cmd->add_option("--t", a.t, "time argument")->required();
    density_cmd->add_option("--x", a.x_list, "comma list of fragment masses / arguments")
        ->required();
    density_cmd->add_option("--mc", a.mc, "Monte Carlo samples per factor");
    add_common(density_cmd);

    CLI::App* vmart = app.add_subcommand("verify-martingale",
                                         "unit-expectation check of the partition weight");
    vmart->add_option("--spec", a.spec)->required();
    vmart->add_option("--t-list", a.t_list, "comma list of times")->required();
    vmart->add_option("--grid", a.grid);
    vmart->add_option("--replicates", a.replicates);
    vmart->add_option("--mc", a.mc, "inner samples per fragment");
    vmart->add_option("--mc-norm", a.mc_norm, "normalizer samples");
    add_common(vmart);

    CLI::App* vmarg = app.add_subcommand("verify-marginal",
                                         "chi-square of the first size-biased pick");
    vmarg->add_option("--t", a.t)->required();
    vmarg->add_option("--grid", a.grid);
    vmarg->add_option("--replicates", a.replicates);
    vmarg->add_option("--bins", a.bins);
    add_common(vmarg);

    CLI::App* vpde = app.add_subcommand("verify-pde", "residual of the dislocation equation");
    vpde->add_option("--spec", a.spec)->required();
    vpde->add_option("--t", a.t)->required();
    vpde->add_option("--x-list", a.x_list, "comma list of masses")->required();
    vpde->add_option("--mc", a.mc);
    vpde->add_option("--tol", a.tol);
    add_common(vpde);

    CLI::App* classify = app.add_subcommand("classify-spec",
                                            "numerical surrogate of the equivalence condition");
    classify->add_option("--spec", a.spec)->required();
    classify->add_option("--delta", a.delta);
    classify->add_option("--x-max", a.x_max);
    classify->add_option("--tol", a.tol);
    add_common(classify, /*needs_seed=*/false);  // fully deterministic, no seed

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << error_json("usage", e.what()).dump() << "\n";
        return 2;
    }

    try {
        json config;
        std::string command;

        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::invalid_argument("cannot open config '" + config_path + "'");
            config = json::parse(in);
            command = config.at("command").get<std::string>();
            auto get = [&config](const char* key, auto fallback) {
                using T = decltype(fallback);
                return config.contains(key) ? config.at(key).get<T>() : fallback;
            };
            a.seed = config.at("seed").get<std::uint64_t>();  // seed stays mandatory
            a.workers = get("workers", a.workers);
            a.out = get("out", a.out);
            a.t = get("t", a.t);
            a.tol = get("tol", a.tol);
            a.delta = get("delta", a.delta);
            a.x_max = get("x_max", a.x_max);
            a.n = get("n", a.n);
            a.grid = get("grid", a.grid);
            a.replicates = get("replicates", a.replicates);
            a.mc = get("mc", a.mc);
            a.mc_norm = get("mc_norm", a.mc_norm);
            a.bins = get("bins", a.bins);
            a.what = get("what", a.what);
            a.spec = config.contains("spec") ? config.at("spec").dump() : a.spec;
            a.t_list = get("t_list", a.t_list);
            a.x_list = get("x_list", a.x_list);
            a.theta = get("theta", a.theta);
            a.sigma_literal = get("sigma_literal", a.sigma_literal);
        } else {
            if (app.get_subcommands().empty()) {
                std::cerr << error_json("usage", "missing subcommand").dump() << "\n";
                return 2;
            }
            command = app.get_subcommands().front()->get_name();
            config = {{"command", command}, {"seed", a.seed}, {"workers", a.workers}};
            if (!a.out.empty()) config["out"] = a.out;
            if (command == "simulate-coalescent") {
                config["n"] = a.n;
                config["t"] = a.t;
                config["replicates"] = a.replicates;
            } else if (command == "simulate-fragmentation") {
                config["t"] = a.t;
                config["grid"] = a.grid;
                config["replicates"] = a.replicates;
                if (!a.theta.empty()) config["theta"] = a.theta;
                config["sigma_literal"] = a.sigma_literal;
            } else if (command == "density") {
                config["what"] = a.what;
                config["spec"] = json::parse(load_spec_text(a.spec));
                config["t"] = a.t;
                config["x_list"] = a.x_list;
                config["mc"] = a.mc;
            } else if (command == "verify-martingale") {
                config["spec"] = json::parse(load_spec_text(a.spec));
                config["t_list"] = a.t_list;
                config["grid"] = a.grid;
                config["replicates"] = a.replicates;
                config["mc"] = a.mc;
                config["mc_norm"] = a.mc_norm;
            } else if (command == "verify-marginal") {
                config["t"] = a.t;
                config["grid"] = a.grid;
                config["replicates"] = a.replicates;
                config["bins"] = a.bins;
            } else if (command == "verify-pde") {
                config["spec"] = json::parse(load_spec_text(a.spec));
                config["t"] = a.t;
                config["x_list"] = a.x_list;
                config["mc"] = a.mc;
                config["tol"] = a.tol;
            } else if (command == "classify-spec") {
                config["spec"] = json::parse(load_spec_text(a.spec));
                config["delta"] = a.delta;
                config["x_max"] = a.x_max;
                config["tol"] = a.tol;
            }
        }

        OutputSink sink;
        if (!a.out.empty()) sink.prefix = a.out;

        if (command == "simulate-coalescent") {
            return run_simulate_coalescent(a.n, a.t, a.replicates, a.seed, a.workers, sink,
                                           config);
        } else if (command == "simulate-fragmentation") {
            const auto theta = a.theta.empty() ? std::vector<double>{} : parse_csv_list(a.theta);
            return run_simulate_fragmentation(a.t, a.grid, a.replicates, a.seed, theta,
                                              a.sigma_literal, a.workers, sink, config);
        } else if (command == "density") {
            return run_density(a.what, load_spec(a.spec), a.t, parse_csv_list(a.x_list), a.mc,
                               a.seed, sink, config);
        } else if (command == "verify-martingale") {
            return run_verify_martingale(load_spec(a.spec), parse_csv_list(a.t_list), a.grid,
                                         a.replicates, a.mc, a.mc_norm, a.seed, a.workers,
                                         sink, config);
        } else if (command == "verify-marginal") {
            return run_verify_marginal(a.t, a.grid, a.replicates, a.bins, a.seed, a.workers,
                                       sink, config);
        } else if (command == "verify-pde") {
            return run_verify_pde(load_spec(a.spec), a.t, parse_csv_list(a.x_list), a.mc,
                                  a.tol, a.seed, a.workers, sink, config);
        } else if (command == "classify-spec") {
            return run_classify_spec(load_spec(a.spec), a.delta, a.x_max, a.tol, sink, config);
        }
        std::cerr << error_json("usage", "unknown command '" + command + "'").dump() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << error_json("invalid_config", e.what()).dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << error_json("runtime", e.what()).dump() << "\n";
        return 1;
    }
}
