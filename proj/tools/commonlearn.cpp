// Command-line front end: scenario ingestion, one subcommand per analysis,
// JSON reports on stdout (or --out) with CSV tables beside them.

#include "cli_support.hpp"

#include "commonlearn/belief_engine.hpp"
#include "commonlearn/bounds.hpp"
#include "commonlearn/contraction.hpp"
#include "commonlearn/epistemic.hpp"
#include "commonlearn/errors.hpp"
#include "commonlearn/montecarlo.hpp"
#include "commonlearn/scenario.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace commonlearn::cli {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Helpers

std::size_t resolve_state(const InfoStructure& info, const std::string& text) {
    if (auto s = info.find_state(text)) return *s;
    try {
        std::size_t used = 0;
        const long n = std::stol(text, &used);
        if (used == text.size() && n >= 1 && static_cast<std::size_t>(n) <= info.num_states())
            return static_cast<std::size_t>(n - 1);
    } catch (const std::exception&) {
    }
    throw ParseError("--state", "unknown state \"" + text + "\"");
}

std::vector<std::size_t> resolve_states(const InfoStructure& info, const std::string& comma_list) {
    std::vector<std::size_t> out;
    std::stringstream in(comma_list);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(resolve_state(info, item));
    if (out.empty()) throw ParseError("--cell", "empty state list");
    return out;
}

std::size_t resolve_agent(const InfoStructure& info, int number) {
    if (number < 1 || static_cast<std::size_t>(number) > info.num_agents())
        throw ParseError("--agent", "agent must be between 1 and " + std::to_string(info.num_agents()));
    return static_cast<std::size_t>(number - 1);
}

std::vector<int> parse_int_list(const std::string& comma_list) {
    std::vector<int> out;
    std::stringstream in(comma_list);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ParseError("", "expected a comma-separated integer list, got \"" + comma_list + "\"");
        }
    }
    return out;
}

Rational parse_radius(const std::string& text) {
    try {
        const Rational r = parse_decimal(text);
        if (r < 0) throw ParseError("--epsilon", "radius must be nonnegative");
        return r;
    } catch (const std::invalid_argument& e) {
        throw ParseError("--epsilon", e.what());
    }
}

std::optional<std::filesystem::path> Output::table_path(const std::string& name) const {
    if (!report_path) return std::nullopt;
    auto p = *report_path;
    return p.replace_filename(p.stem().string() + "." + name + ".csv");
}

void Output::emit(const RunReport& report) const {
    const auto text = report.to_json().dump(2) + "\n";
    if (!report_path) {
        std::cout << text;
        return;
    }
    std::ofstream out(*report_path);
    if (!out) throw std::runtime_error("cannot write " + report_path->string());
    out << text;
}

void Output::attach(RunReport& report, const std::string& name, const CsvTable& table) const {
    if (const auto path = table_path(name)) {
        table.write(*path);
        report.results["tables"][name] = path->string();
    }
}

namespace {

double parse_q(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw ParseError("--q", "q must lie in [0, 1]");
    return q;
}

json state_labels(const InfoStructure& info, const std::vector<std::size_t>& states) {
    json out = json::array();
    for (auto s : states) out.push_back(info.state_label(s));
    return out;
}

// Shared flags
struct Flags {
    std::string scenario;
    std::string out;
    int agent = 1;
    std::string counts;
    std::string state;
    std::string cell;
    std::string event = "ball";
    std::string epsilon = "0.05";
    std::string rule = "iterate";
    std::string mode = "exact";
    std::string t_grid;
    double q = 0.9;
    double slack = 0.0;
    double beta = 0.0;
    int t = 0;
    int other = 0;
    int max_horizon = 10000;
    std::size_t n = 100000;
    std::uint64_t seed = 0;
    bool full = false;
    bool conditional = false;
};

InfoStructure load(const Flags& f) {
    const auto path = f.scenario.empty() ? bundled_scenario("example1") : std::filesystem::path(f.scenario);
    return load_scenario(path);
}

std::vector<std::size_t> cell_or_default(const InfoStructure& info, const Flags& f, std::size_t state) {
    if (!f.cell.empty()) return resolve_states(info, f.cell);
    return common_identification(info).cell_containing(state);
}

// ---------------------------------------------------------------------------
// Commands. Each fills report.results and returns an exit code.

int cmd_validate(const InfoStructure& info, const Flags&, RunReport& report, const Output&) {
    const auto v = validate(info);
    report.results["validation"] = to_json(info, v);
    if (!v.passed()) require_valid(info);
    return ok;
}

int cmd_identify(const InfoStructure& info, const Flags&, RunReport& report, const Output&) {
    require_valid(info);
    json agents = json::array();
    for (std::size_t l = 0; l < info.num_agents(); ++l)
        agents.push_back({{"agent", l + 1}, {"partition", to_json(info, identification_partition(info, l))}});
    report.results["agents"] = agents;
    report.results["common_identification"] = to_json(info, common_identification(info));
    report.results["mode"] = info.tolerance() ? "tolerance" : "exact";
    return ok;
}

int cmd_posterior(const InfoStructure& info, const Flags& f, RunReport& report, const Output&) {
    require_valid(info);
    const auto agent = resolve_agent(info, f.agent);
    CountVector c{parse_int_list(f.counts)};
    if (c.counts.size() != static_cast<std::size_t>(info.alphabet_size(agent)))
        throw ParseError("--counts", "expected " + std::to_string(info.alphabet_size(agent)) + " counts");
    const auto post = posterior(info, agent, c);
    const auto exact = posterior_exact(info, agent, c);
    json rows = json::array();
    for (std::size_t s = 0; s < info.num_states(); ++s)
        rows.push_back({{"state", info.state_label(s)},
                        {"posterior", post[s]},
                        {"exact", to_string(exact[s])},
                        {"log_likelihood", number(log_likelihood(info, agent, s, c))}});
    report.results["agent"] = f.agent;
    report.results["counts"] = c.counts;
    report.results["posterior"] = rows;
    return ok;
}

int cmd_event_prob(const InfoStructure& info, const Flags& f, RunReport& report, const Output& output) {
    require_valid(info);
    if (f.cell.empty()) throw ParseError("--cell", "an event needs --cell");
    const auto cell = resolve_states(info, f.cell);
    const Rational radius = parse_radius(f.epsilon);
    const EpistemicModel model(info, f.t, EngineLimits::for_structure(info));
    EpistemicEvent event = [&] {
        if (f.event == "ball") return identified_ball_event(model, radius, cell);
        if (f.event == "state") return state_event(model, cell);
        throw ParseError("--event", "expected \"ball\" or \"state\"");
    }();
    report.results["event"] = {{"kind", f.event}, {"cell", state_labels(info, cell)}, {"t", f.t}, {"size", event.count()}};
    if (f.event == "ball") report.results["event"]["epsilon"] = f.epsilon;
    if (!f.state.empty()) {
        const auto s = resolve_state(info, f.state);
        report.results["conditioning"] = info.state_label(s);
        report.results["probability"] = event_probability(model, event, s);
    } else {
        report.results["conditioning"] = nullptr;
        report.results["probability"] = event_probability(model, event);
    }
    output.attach(report, "event", event_table(model, event));
    return ok;
}

int cmd_common_belief(const InfoStructure& info, const Flags& f, RunReport& report, const Output& output) {
    require_valid(info);
    if (f.cell.empty()) throw ParseError("--cell", "common belief needs --cell");
    const auto cell = resolve_states(info, f.cell);
    const double q = parse_q(f.q);
    CommonBeliefRule rule = CommonBeliefRule::iterate_then_intersect;
    if (f.rule == "intersect")
        rule = CommonBeliefRule::believe_intersection;
    else if (f.rule != "iterate")
        throw ParseError("--rule", "expected \"iterate\" or \"intersect\"");
    const EpistemicModel model(info, f.t, EngineLimits::for_structure(info));
    const auto target = state_event(model, cell);
    const auto result = common_belief_event(model, q, target, rule, f.slack);
    json probs = json::object();
    for (std::size_t s = 0; s < info.num_states(); ++s)
        probs[info.state_label(s)] = event_probability(model, result.event, s);
    report.results["cell"] = state_labels(info, cell);
    report.results["q"] = q;
    report.results["t"] = f.t;
    report.results["rule"] = f.rule;
    report.results["slack"] = f.slack;
    report.results["iterations"] = result.iterations;
    report.results["size"] = result.event.count();
    report.results["probability_given_state"] = probs;
    report.results["probability"] = event_probability(model, result.event);
    output.attach(report, "common_belief", event_table(model, result.event));
    return ok;
}

int cmd_evidence_check(const InfoStructure& info, const Flags& f, RunReport& report, const Output&) {
    require_valid(info);
    if (f.cell.empty()) throw ParseError("--cell", "evidence check needs --cell");
    const auto cell = resolve_states(info, f.cell);
    const double q = parse_q(f.q);
    const Rational radius = parse_radius(f.epsilon);
    const auto horizons = f.t_grid.empty() ? std::vector<int>{f.t} : parse_int_list(f.t_grid);
    json rows = json::array();
    json evident_from = nullptr;
    for (int t : horizons) {
        const EpistemicModel model(info, t, EngineLimits::for_structure(info));
        const auto r = is_q_evident(model, q, identified_ball_event(model, radius, cell), 10, f.slack);
        auto row = to_json(info, r);
        row["t"] = t;
        rows.push_back(row);
        if (!r.is_evident)
            evident_from = nullptr;
        else if (evident_from.is_null())
            evident_from = t;
    }
    report.results["cell"] = state_labels(info, cell);
    report.results["epsilon"] = f.epsilon;
    report.results["checks"] = rows;
    report.results["evident_from"] = evident_from;
    return ok;
}

int cmd_contraction(const InfoStructure& info, const Flags&, RunReport& report, const Output& output) {
    require_valid(info);
    json matrices = json::array();
    CsvTable table{{"state", "from", "to", "coefficient", "coefficient_value"}, {}};
    for (std::size_t s = 0; s < info.num_states(); ++s)
        for (std::size_t a = 0; a < info.num_agents(); ++a)
            for (std::size_t b = 0; b < info.num_agents(); ++b) {
                if (a == b) continue;
                const auto m = prediction_matrix(info, s, a, b);
                auto j = to_json(info, m);
                json tight = json::array();
                for (const auto& v : tightness_vertices(m)) tight.push_back({v.row_a, v.row_b});
                j["tight_vertex_pairs"] = tight;
                matrices.push_back(j);
                table.rows.push_back({info.state_label(s), std::to_string(a + 1), std::to_string(b + 1),
                                      to_string(m.coefficient), format_double(to_double(m.coefficient))});
            }
    json consistency = json::array();
    bool all_exact = true;
    for (const auto& c : verify_marginal_consistency(info)) {
        all_exact = all_exact && c.exact;
        json dev = json::array();
        for (const auto& d : c.deviation) dev.push_back(to_string(d));
        consistency.push_back(
            {{"state", info.state_label(c.state)}, {"from", c.from + 1}, {"to", c.to + 1}, {"exact", c.exact}, {"deviation", dev}});
    }
    const auto lambda = global_contraction_coefficient(info);
    report.results["matrices"] = matrices;
    report.results["lambda"] = to_string(lambda);
    report.results["lambda_value"] = to_double(lambda);
    report.results["marginal_consistency"] = consistency;
    report.results["marginal_consistency_exact"] = all_exact;
    output.attach(report, "contraction", table);
    return ok;
}

int cmd_bounds(const InfoStructure& info, const Flags& f, RunReport& report, const Output&) {
    require_valid(info);
    const double q = parse_q(f.q);
    const double radius = to_double(parse_radius(f.epsilon));
    ThresholdOptions options;
    options.max_horizon = f.max_horizon;
    options.limits = EngineLimits::for_structure(info);
    const auto set = compute_bounds(info, q, radius, f.beta > 0.0 ? std::optional(f.beta) : std::nullopt, options);
    report.results["bounds"] = to_json(info, set);
    if (!set.gap.positive()) report.results["bounds"]["note"] = "KL gap is not positive at this epsilon; no threshold";
    return ok;
}

int cmd_simulate(const InfoStructure& info, const Flags& f, RunReport& report, const Output& output) {
    require_valid(info);
    if (f.state.empty()) throw ParseError("--state", "simulation needs --state");
    const auto state = resolve_state(info, f.state);
    const auto cell = cell_or_default(info, f, state);
    const Rational radius = parse_radius(f.epsilon);
    const SimulationPlan plan{state, f.t, f.n, f.seed};
    report.seeds.push_back(f.seed);
    const auto e = estimate_event(info, plan, ball_predicate(info, radius, cell));
    report.results["state"] = info.state_label(state);
    report.results["cell"] = state_labels(info, cell);
    report.results["t"] = f.t;
    report.results["epsilon"] = f.epsilon;
    report.results["ball"] = to_json(e);
    CsvTable table{{"t", "estimate", "se", "n", "seed"},
                   {{std::to_string(f.t), format_double(e.mean), format_double(e.standard_error), std::to_string(e.n),
                     std::to_string(f.seed)}}};
    if (f.conditional) {
        const auto agent = resolve_agent(info, f.agent);
        const auto other = f.other > 0 ? resolve_agent(info, f.other) : (agent + 1) % info.num_agents();
        const auto r = verify_conditional_prediction(info, state, agent, other, f.t, radius, f.n, f.seed);
        auto j = to_json(r);
        j["agent"] = agent + 1;
        j["counterparty"] = other + 1;
        report.results["conditional_prediction"] = j;
    }
    output.attach(report, "simulate", table);
    return ok;
}

int cmd_curve(const InfoStructure& info, const Flags& f, RunReport& report, const Output& output) {
    require_valid(info);
    if (f.state.empty()) throw ParseError("--state", "curve needs --state");
    const auto state = resolve_state(info, f.state);
    const auto cell = cell_or_default(info, f, state);
    const double q = parse_q(f.q);
    const Rational radius = parse_radius(f.epsilon);
    if (f.t_grid.empty()) throw ParseError("--t-grid", "curve needs --t-grid");
    const auto grid = parse_int_list(f.t_grid);
    CurveOptions options;
    options.limits = EngineLimits::for_structure(info);
    options.paths = f.n;
    options.seed = f.seed;
    if (f.mode == "montecarlo") {
        options.mode = CurveMode::montecarlo;
        report.seeds.push_back(f.seed);
    } else if (f.mode != "exact") {
        throw ParseError("--mode", "expected \"exact\" or \"montecarlo\"");
    }
    const auto rows = convergence_curve(info, state, q, radius, cell, grid, options);
    json out = json::array();
    CsvTable table;
    table.header = options.mode == CurveMode::exact ? std::vector<std::string>{"t", "ball", "mutual", "common", "iterations"}
                                                    : std::vector<std::string>{"t", "ball", "se", "n", "seed"};
    for (const auto& r : rows) {
        json j{{"t", r.horizon}, {"ball", r.ball}};
        if (r.ball_standard_error) j["ball_se"] = *r.ball_standard_error;
        if (r.mutual) j["mutual"] = *r.mutual;
        if (r.common) j["common"] = *r.common;
        if (r.common_iterations) j["common_iterations"] = *r.common_iterations;
        out.push_back(j);
        if (options.mode == CurveMode::exact)
            table.rows.push_back({std::to_string(r.horizon), format_double(r.ball), format_double(*r.mutual),
                                  format_double(*r.common), std::to_string(*r.common_iterations)});
        else
            table.rows.push_back({std::to_string(r.horizon), format_double(r.ball), format_double(*r.ball_standard_error),
                                  std::to_string(f.n), std::to_string(f.seed)});
    }
    report.results["state"] = info.state_label(state);
    report.results["cell"] = state_labels(info, cell);
    report.results["q"] = q;
    report.results["epsilon"] = f.epsilon;
    report.results["mode"] = f.mode;
    report.results["rows"] = out;
    output.attach(report, "curve", table);
    return ok;
}

int cmd_reproduce(const InfoStructure& info, const Flags& f, RunReport& report, const Output& output) {
    require_valid(info);
    const auto items = reproduce_example1(info, f.full, output, report);
    json out = json::array();
    bool all = true;
    for (const auto& item : items) {
        out.push_back({{"item", item.name}, {"passed", item.passed}, {"detail", item.detail}});
        all = all && item.passed;
    }
    report.results["items"] = out;
    report.results["passed"] = all;
    return all ? ok : invariant_failure;
}

void print_error(const std::string& kind, const std::string& message, const std::string& where = "") {
    json e{{"error", kind}, {"message", message}};
    if (!where.empty()) e["where"] = where;
    std::cerr << e.dump() << '\n';
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Exact laboratory for common learning on finite information structures"};
    app.set_version_flag("--version", std::string(COMMONLEARN_VERSION));
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_option("--scenario", f.scenario, "Scenario JSON (default: bundled Example 1)");
    app.add_option("--out", f.out, "Write the report here; CSV tables go beside it");

    using Command = std::function<int(const InfoStructure&, const Flags&, RunReport&, const Output&)>;
    std::vector<std::pair<CLI::App*, Command>> commands;
    auto add = [&](const char* name, const char* help, Command cmd) {
        auto* sub = app.add_subcommand(name, help);
        commands.emplace_back(sub, std::move(cmd));
        return sub;
    };

    add("validate", "Check the structure's invariants", cmd_validate);
    add("identify", "Identification partitions and their join", cmd_identify);
    auto* post = add("posterior", "Posterior over states from one agent's counts", cmd_posterior);
    post->add_option("--agent", f.agent, "Agent number (1-based)")->required();
    post->add_option("--counts", f.counts, "Comma-separated signal counts")->required();
    auto* ev = add("event-prob", "Probability of a ball or state event", cmd_event_prob);
    ev->add_option("--state", f.state, "Conditioning state (omit for the prior)");
    ev->add_option("--event", f.event, "ball | state")->capture_default_str();
    ev->add_option("--cell", f.cell, "Comma-separated states")->required();
    ev->add_option("--t", f.t, "Horizon")->required();
    ev->add_option("--epsilon", f.epsilon, "Ball radius")->capture_default_str();
    auto* cb = add("common-belief", "Common q-belief in a cell's state event", cmd_common_belief);
    cb->add_option("--q", f.q, "Belief level")->required();
    cb->add_option("--t", f.t, "Horizon")->required();
    cb->add_option("--cell", f.cell, "Comma-separated states")->required();
    cb->add_option("--rule", f.rule, "iterate | intersect")->capture_default_str();
    cb->add_option("--slack", f.slack, "Belief threshold slack")->capture_default_str();
    auto* evid = add("evidence-check", "Is the cell's ball q-evident?", cmd_evidence_check);
    evid->add_option("--q", f.q, "Belief level")->required();
    evid->add_option("--t", f.t, "Horizon");
    evid->add_option("--t-grid", f.t_grid, "Comma-separated horizons (instead of --t)");
    evid->add_option("--epsilon", f.epsilon, "Ball radius")->required();
    evid->add_option("--cell", f.cell, "Comma-separated states")->required();
    evid->add_option("--slack", f.slack, "Belief threshold slack")->capture_default_str();
    add("contraction", "Prediction matrices and contraction coefficients", cmd_contraction);
    auto* bd = add("bounds", "KL gap, admissible radius, Sanov exponents, beta and T", cmd_bounds);
    bd->add_option("--q", f.q, "Belief level")->required();
    bd->add_option("--epsilon", f.epsilon, "Ball radius")->required();
    bd->add_option("--beta", f.beta, "Exponent (default: half the supremum)");
    bd->add_option("--max-horizon", f.max_horizon, "Search limit for T")->capture_default_str();
    auto* sim = add("simulate", "Monte Carlo estimate of a ball probability", cmd_simulate);
    sim->add_option("--state", f.state, "True state")->required();
    sim->add_option("--t", f.t, "Horizon")->required();
    sim->add_option("--n", f.n, "Number of paths")->capture_default_str();
    sim->add_option("--seed", f.seed, "Master seed")->capture_default_str();
    sim->add_option("--epsilon", f.epsilon, "Ball radius")->capture_default_str();
    sim->add_option("--cell", f.cell, "Cell (default: the state's common-identification cell)");
    sim->add_flag("--conditional", f.conditional, "Also check the conditional prediction inequality");
    sim->add_option("--agent", f.agent, "Predicting agent for --conditional")->capture_default_str();
    sim->add_option("--other", f.other, "Predicted agent for --conditional");
    auto* cv = add("curve", "Ball, mutual and common belief probabilities over horizons", cmd_curve);
    cv->add_option("--state", f.state, "True state")->required();
    cv->add_option("--cell", f.cell, "Cell (default: the state's common-identification cell)");
    cv->add_option("--q", f.q, "Belief level")->capture_default_str();
    cv->add_option("--epsilon", f.epsilon, "Ball radius")->capture_default_str();
    cv->add_option("--t-grid", f.t_grid, "Comma-separated horizons")->required();
    cv->add_option("--mode", f.mode, "exact | montecarlo")->capture_default_str();
    cv->add_option("--n", f.n, "Paths in montecarlo mode")->capture_default_str();
    cv->add_option("--seed", f.seed, "Seed in montecarlo mode")->capture_default_str();
    auto* rep = add("reproduce-example1", "Golden checks for the bundled four-state example", cmd_reproduce);
    rep->add_flag("--full", f.full, "Include the slow exact-engine items");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        return parse_failure;
    }

    const Output output{f.out.empty() ? std::nullopt : std::optional<std::filesystem::path>(f.out)};
    try {
        const auto start = std::chrono::steady_clock::now();
        const auto info = load(f);
        RunReport report;
        report.command.assign(argv, argv + argc);
        report.scenario_digest = scenario_digest(info);
        int code = ok;
        for (const auto& [sub, cmd] : commands)
            if (sub->parsed()) code = cmd(info, f, report, output);
        report.elapsed_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        output.emit(report);
        return code;
    } catch (const ParseError& e) {
        print_error("parse", e.what(), e.where());
        return parse_failure;
    } catch (const InfeasibleCounts& e) {
        print_error("infeasible_counts", e.what());
        return parse_failure;
    } catch (const CapacityError& e) {
        print_error("capacity", e.what());
        return capacity_exceeded;
    } catch (const InvariantViolation& e) {
        print_error("invariant", e.what());
        return invariant_failure;
    } catch (const std::invalid_argument& e) {
        print_error("invalid_argument", e.what());
        return parse_failure;
    } catch (const std::out_of_range& e) {
        print_error("invalid_argument", e.what());
        return parse_failure;
    } catch (const std::domain_error& e) {
        print_error("domain", e.what());
        return parse_failure;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return invariant_failure;
    }
}

}  // namespace commonlearn::cli

int main(int argc, char** argv) { return commonlearn::cli::run(argc, argv); }
