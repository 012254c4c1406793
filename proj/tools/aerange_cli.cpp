// aerange: inner and outer reachable sets of discrete-time systems.
//
//   aerange reach    --model M [--steps K] ...   CSV per (step, component)
//   aerange range    --model M [--steps K] ...   ranges of the K-fold map only
//   aerange validate --model M [--samples N]     sampled trajectories vs over sets
//
// Exit status: 0 ok, 1 model or I/O error, 2 bad flags, 3 violation found.

#include <aerange/io.hpp>
#include <aerange/model.hpp>
#include <aerange/reach.hpp>
#include <aerange/svg.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace
{

using namespace aerange;

struct RunConfig
{
    std::string model;
    std::optional<std::size_t> steps;
    ReachOptions reach;
    std::size_t samples = 10000;
    std::string out;
    std::string json;
    std::string svg;
};

class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

void add_common(CLI::App& cmd, RunConfig& cfg)
{
    static const std::map<std::string, ReachMethod> methods{{"iterate", ReachMethod::iterate},
                                                            {"unroll", ReachMethod::unroll}};
    static const std::map<std::string, Order> orders{{"mv", Order::mv}, {"taylor2", Order::taylor2}};
    static const std::map<std::string, Precondition> preconds{{"none", Precondition::none},
                                                              {"jacobian-center", Precondition::jacobian_center}};
    cmd.add_option("--model", cfg.model, "model file")->required()->check(CLI::ExistingFile);
    cmd.add_option("--steps", cfg.steps, "number of steps (default: model horizon)");
    cmd.add_option("--method", cfg.reach.method, "iterate | unroll")
        ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case));
    cmd.add_option("--order", cfg.reach.order, "mv | taylor2")
        ->transform(CLI::CheckedTransformer(orders, CLI::ignore_case));
    cmd.add_option("--quadrature", cfg.reach.quadrature_k, "ring count for the mean-value order")
        ->check(CLI::Range(1, 1000));
    cmd.add_option("--precondition", cfg.reach.precondition, "none | jacobian-center")
        ->transform(CLI::CheckedTransformer(preconds, CLI::ignore_case));
    cmd.add_flag("--robust", cfg.reach.robust, "treat disturbances as universally quantified");
    cmd.add_option("--samples", cfg.samples, "sampled trajectories")->check(CLI::PositiveNumber);
    cmd.add_option("--seed", cfg.reach.seed, "sampling seed");
    cmd.add_option("--out", cfg.out, "CSV output (default: stdout)");
    cmd.add_option("--json", cfg.json, "JSON output");
    cmd.add_option("--svg", cfg.svg, "SVG plot of the first two components");
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream f(path);
    if (!f) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    return f;
}

ReachResult run_reach(const SystemModel& m, RunConfig& cfg, std::size_t default_steps)
{
    if (cfg.reach.order == Order::taylor2 && cfg.reach.quadrature_k != 1) {
        throw UsageError("--quadrature requires --order mv");
    }
    cfg.reach.steps = cfg.steps.value_or(default_steps);
    ReachResult r = reach(m, cfg.reach);
    for (const auto& w : r.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    return r;
}

void write_outputs(const SystemModel& m, const RunConfig& cfg, const ReachResult& r, const ReachResult& table)
{
    if (cfg.out.empty()) {
        write_csv(std::cout, table, m.states);
    } else {
        auto f = open_output(cfg.out);
        write_csv(f, table, m.states);
    }
    if (!cfg.json.empty()) {
        open_output(cfg.json) << to_json(r, m.states).dump(1) << '\n';
    }
    if (!cfg.svg.empty()) {
        if (m.n() < 2) {
            std::cerr << "warning: --svg needs at least two state components\n";
            return;
        }
        const std::size_t n = std::min<std::size_t>(cfg.samples, 300);
        const auto clouds = simulate_samples(m, n, cfg.reach.seed, r.steps.size() - 1);
        open_output(cfg.svg) << render_svg(r, m.states, clouds);
    }
}

int cmd_reach(RunConfig& cfg)
{
    const SystemModel m = load_model(cfg.model);
    const ReachResult r = run_reach(m, cfg, m.horizon);
    write_outputs(m, cfg, r, r);
    std::cerr << to_string(r.method) << ": " << r.steps.size() - 1 << " steps in " << r.seconds << " s\n";
    return 0;
}

int cmd_range(RunConfig& cfg)
{
    const SystemModel m = load_model(cfg.model);
    const ReachResult r = run_reach(m, cfg, 1);
    ReachResult last;
    last.method = r.method;
    last.steps.push_back(r.steps.back());
    const std::size_t k = r.steps.size() - 1;
    if (cfg.out.empty()) {
        write_csv(std::cout, last, m.states, k);
    } else {
        auto f = open_output(cfg.out);
        write_csv(f, last, m.states, k);
    }
    if (!cfg.json.empty()) {
        open_output(cfg.json) << to_json(r, m.states).dump(1) << '\n';
    }
    return 0;
}

int cmd_validate(RunConfig& cfg)
{
    const SystemModel m = load_model(cfg.model);
    const ReachResult r = run_reach(m, cfg, m.horizon);
    if (!cfg.out.empty() || !cfg.json.empty() || !cfg.svg.empty()) {
        RunConfig files = cfg;
        if (files.out.empty()) {
            files.out = "/dev/null";
        }
        write_outputs(m, files, r, r);
    }
    // Samples follow arbitrary disturbances, so with --robust they are
    // checked against the plain over sets.
    ReachResult plain;
    if (cfg.reach.robust) {
        ReachOptions o = cfg.reach;
        o.robust = false;
        plain = reach(m, o);
    }
    const ContainmentReport rep = check_samples(m, cfg.reach.robust ? plain : r, cfg.samples, cfg.reach.seed);
    std::size_t nested = 0;
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
        if (!corners_inside(r.steps[k].under, r.steps[k].over)) {
            ++nested;
            std::cerr << "under set not inside over set at step " << k << '\n';
        }
    }
    std::cout << "checked " << rep.checked << " sample states over " << r.steps.size() << " steps: "
              << rep.violations << " outside the over sets";
    if (rep.first_step) {
        std::cout << " (first at step " << *rep.first_step << ", trajectory " << *rep.first_trajectory << ")";
    }
    std::cout << "; under-in-over failures: " << nested << '\n';
    return rep.violations == 0 && nested == 0 ? 0 : 3;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Inner and outer reachable sets of discrete-time systems"};
    app.require_subcommand(1);
    RunConfig cfg;
    cfg.reach.seed = 42;
    CLI::App* reach_cmd = app.add_subcommand("reach", "reachable sets for every step");
    CLI::App* range_cmd = app.add_subcommand("range", "ranges of the K-fold map (default K = 1)");
    CLI::App* validate_cmd = app.add_subcommand("validate", "check sampled trajectories against the over sets");
    for (CLI::App* c : {reach_cmd, range_cmd, validate_cmd}) {
        add_common(*c, cfg);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << '\n' << app.help();
        return 2;
    }
    try {
        if (reach_cmd->parsed()) {
            return cmd_reach(cfg);
        }
        if (range_cmd->parsed()) {
            return cmd_range(cfg);
        }
        return cmd_validate(cfg);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << cfg.model << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
