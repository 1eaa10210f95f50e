#include "cli_support.hpp"

#include "commonlearn/bounds.hpp"
#include "commonlearn/contraction.hpp"
#include "commonlearn/errors.hpp"
#include "commonlearn/epistemic.hpp"

#include <array>
#include <cmath>
#include <set>
#include <sstream>

namespace commonlearn::cli {

using nlohmann::json;

namespace {

Partition labelled_partition(const InfoStructure& info, std::initializer_list<std::initializer_list<const char*>> cells) {
    std::vector<std::vector<std::size_t>> out;
    for (const auto& cell : cells) {
        std::vector<std::size_t> states;
        for (const char* label : cell) {
            const auto s = info.find_state(label);
            if (!s) throw InvariantViolation(std::string("bundled scenario lacks state ") + label);
            states.push_back(*s);
        }
        out.push_back(std::move(states));
    }
    return Partition(std::move(out));
}

std::size_t state_named(const InfoStructure& info, const char* label) {
    const auto s = info.find_state(label);
    if (!s) throw InvariantViolation(std::string("bundled scenario lacks state ") + label);
    return *s;
}

ReproItem partitions_item(const InfoStructure& info) {
    const auto q1 = identification_partition(info, 0);
    const auto q2 = identification_partition(info, 1);
    const auto qi = common_identification(info);
    const bool passed = q1 == labelled_partition(info, {{"theta1", "theta2"}, {"theta3"}, {"theta4"}}) &&
                        q2 == labelled_partition(info, {{"theta1", "theta3"}, {"theta2"}, {"theta4"}}) &&
                        qi == labelled_partition(info, {{"theta1", "theta2", "theta3"}, {"theta4"}});
    return {"partitions", passed, {{"agent1", to_json(info, q1)}, {"agent2", to_json(info, q2)}, {"join", to_json(info, qi)}}};
}

ReproItem prediction_item(const InfoStructure& info) {
    const auto m1 = prediction_matrix(info, state_named(info, "theta1"), 0, 1);
    const auto m2 = prediction_matrix(info, state_named(info, "theta2"), 0, 1);
    bool passed = true;
    json rows = json::array();
    for (const char* text : {"0", "0.01", "0.05"}) {
        const Rational nu = parse_decimal(text);
        const std::vector<Rational> own{Rational(1, 2) + nu, Rational(1, 2) - nu};
        const auto p1 = predict_counterparty(own, m1);
        const auto p2 = predict_counterparty(own, m2);
        const std::vector<Rational> want1{(1 + nu) / 2, (1 - nu) / 2};
        const std::vector<Rational> want2{(2 + nu) / 3, (1 - nu) / 3};
        const bool ok1 = p1 == want1, ok2 = p2 == want2;
        passed = passed && ok1 && ok2;
        rows.push_back({{"nu", text},
                        {"theta1", {to_string(p1[0]), to_string(p1[1])}},
                        {"theta2", {to_string(p2[0]), to_string(p2[1])}},
                        {"matches", ok1 && ok2}});
    }
    bool consistent = true;
    for (const auto& c : verify_marginal_consistency(info)) consistent = consistent && c.exact;
    return {"prediction_calculations", passed && consistent, {{"rows", rows}, {"marginal_consistency_exact", consistent}}};
}

ReproItem dobrushin_item(const InfoStructure& info) {
    const std::array<std::pair<const char*, Rational>, 4> expected{{{"theta1", Rational(1, 2)},
                                                                    {"theta2", Rational(1, 3)},
                                                                    {"theta3", Rational(3, 8)},
                                                                    {"theta4", Rational(1, 6)}}};
    bool passed = true;
    json detail = json::object();
    for (const auto& [label, want] : expected) {
        const auto m = prediction_matrix(info, state_named(info, label), 0, 1);
        passed = passed && m.coefficient == want;
        detail[label] = to_string(m.coefficient);
    }
    const auto lambda = global_contraction_coefficient(info);
    passed = passed && lambda == Rational(1, 2);
    detail["lambda"] = to_string(lambda);
    return {"dobrushin_coefficients", passed, detail};
}

ReproItem region_item(const InfoStructure& info, const Output& output, RunReport& report) {
    const int t = 60;
    const Rational radius(1, 20);
    const auto theta4 = state_named(info, "theta4");
    const EpistemicModel model(info, t);
    const std::vector<std::size_t> cell{theta4};
    const auto event = identified_ball_event(model, radius, cell);

    std::set<int> zero_counts;
    const auto& space = model.space();
    for (std::size_t p = 0; p < space.size(); ++p)
        if (event.contains(theta4, p)) zero_counts.insert(space.at(p).agents[0].counts[0]);
    const std::set<int> want{33, 34, 35, 36, 37, 38, 39};

    output.attach(report, "region_t60", event_table(model, event));
    return {"region_export",
            zero_counts == want,
            {{"t", t}, {"epsilon", "1/20"}, {"agent1_zero_counts", zero_counts}, {"members", event.count()}}};
}

ReproItem gap_item(const InfoStructure& info) {
    const auto gap = global_kl_gap(info, 0.02);
    const auto bar = max_epsilon(info);
    return {"kl_gap", gap.positive() && !bar.degenerate && bar.value > 0.02,
            {{"b", to_json(info, gap)}, {"epsilon_bar", bar.value}}};
}

ReproItem beta_item() {
    // q^b (1 - 2 (1 - q^b)) > q is a quadratic in y = q^b: 2y^2 - y - q > 0.
    const double q = 0.9;
    const double y = (1.0 + std::sqrt(1.0 + 8.0 * q)) / 4.0;
    const double closed = std::log(y) / std::log(q);
    const double beta = beta_for(q, 2);
    return {"beta_star", std::abs(beta - closed) <= 1e-6, {{"beta_star", beta}, {"closed_form", closed}}};
}

ReproItem necessity_item(const InfoStructure& info) {
    const auto theta1 = state_named(info, "theta1");
    const std::vector<std::size_t> target{theta1};
    json rows = json::array();
    bool passed = true;
    for (int t : {1, 10, 60, 200}) {
        const EpistemicModel model(info, t);
        const auto event = state_event(model, target);
        const double belief = event_probability(model, individual_belief_operator(model, 0.5 + 1e-9, 0, event), theta1);
        const double common = event_probability(model, common_belief_event(model, 0.5 + 1e-9, event).event, theta1);
        passed = passed && belief == 0.0 && common == 0.0;
        rows.push_back({{"t", t}, {"agent1_belief", belief}, {"common_belief", common}});
    }
    return {"necessity_theta1", passed, {{"q", "just above 1/2"}, {"rows", rows}}};
}

ReproItem individual_learning_item(const InfoStructure& info) {
    const auto theta4 = state_named(info, "theta4");
    const std::vector<std::size_t> target{theta4};
    json rows = json::array();
    bool crossed = false, monotone = true;
    std::optional<double> previous;
    for (int t = 100; t <= 600; t += 100) {
        const EpistemicModel model(info, t);
        const double p = event_probability(model, individual_belief_operator(model, 0.9, 0, state_event(model, target)), theta4);
        if (previous && *previous >= 0.5 && p < *previous - 1e-9) monotone = false;
        crossed = crossed || p > 0.99;
        previous = p;
        rows.push_back({{"t", t}, {"probability", p}});
    }
    return {"individual_learning_theta4", crossed && monotone, {{"q", 0.9}, {"rows", rows}}};
}

ReproItem sufficiency_item(const InfoStructure& info) {
    const double q = 0.8;
    const Rational radius(1, 50);
    const auto qi = common_identification(info);
    json rows = json::array();
    bool passed = false;
    for (int t : {200, 400, 600}) {
        const EpistemicModel model(info, t);
        bool all = true;
        json cells = json::array();
        for (const auto& cell : qi.cells()) {
            const auto common = common_belief_event(model, q, state_event(model, cell));
            const auto evidence = is_q_evident(model, q, identified_ball_event(model, radius, cell));
            json probs = json::object();
            for (auto s : cell) {
                const double p = event_probability(model, common.event, s);
                probs[info.state_label(s)] = p;
                all = all && p >= q;
            }
            all = all && evidence.is_evident;
            json labels = json::array();
            for (auto s : cell) labels.push_back(info.state_label(s));
            cells.push_back({{"cell", labels},
                             {"common_belief", probs},
                             {"ball_evident", evidence.is_evident},
                             {"witnesses", evidence.violations}});
        }
        rows.push_back({{"t", t}, {"cells", cells}, {"passed", all}});
        if (all) {
            passed = true;
            break;
        }
    }
    return {"common_learning_sufficiency", passed, {{"q", q}, {"epsilon", "1/50"}, {"rows", rows}}};
}

}  // namespace

CsvTable event_table(const EpistemicModel& model, const EpistemicEvent& event) {
    std::ostringstream text;
    write_event_csv(text, model, event, true);
    std::istringstream in(text.str());
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (first)
            table.header = std::move(cells);
        else
            table.rows.push_back(std::move(cells));
        first = false;
    }
    return table;
}

std::vector<ReproItem> reproduce_example1(const InfoStructure& info, bool full, const Output& output, RunReport& report) {
    std::vector<ReproItem> items;
    items.push_back(partitions_item(info));
    items.push_back(prediction_item(info));
    items.push_back(dobrushin_item(info));
    items.push_back(region_item(info, output, report));
    items.push_back(gap_item(info));
    items.push_back(beta_item());
    items.push_back(necessity_item(info));
    if (full) {
        items.push_back(individual_learning_item(info));
        items.push_back(sufficiency_item(info));
    }
    return items;
}

}  // namespace commonlearn::cli
