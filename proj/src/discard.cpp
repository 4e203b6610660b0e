#include "decklab/discard.hpp"

#include "decklab/entropy.hpp"
#include "decklab/errors.hpp"

#include <json.hpp>

#include <algorithm>

namespace decklab::discard {

ToySystem exercise_system() {
    ToySystem sys;
    sys.variable_names = {"Face", "Suit"};
    sys.value_names = {{"K", "Q"}, {"S", "H"}};
    sys.return_value = {0, 1};  // Face returns on K, Suit returns on H
    sys.cards = {{0, 0}, {1, 1}};  // K of S, Q of H
    return sys;
}

namespace {

void check_steps(const ToySystem& sys, const std::vector<int>& steps) {
    for (int v : steps)
        if (v < 0 || v >= static_cast<int>(sys.variable_names.size()))
            throw EngineError("discard step names an unknown variable");
}

void walk(const ToySystem& sys, std::vector<int>& deck, const std::vector<int>& steps,
          std::size_t depth, std::vector<int>& outcomes, const Rational& mass,
          std::vector<Leaf>& leaves) {
    if (depth == steps.size()) {
        leaves.push_back({outcomes, mass});
        return;
    }
    const int var = steps[depth];
    if (deck.empty()) {
        // Nothing to draw: this history ends in no-draws all the way down.
        outcomes.push_back(kNoDraw);
        walk(sys, deck, steps, depth + 1, outcomes, mass, leaves);
        outcomes.pop_back();
        return;
    }
    const Rational each = mass / Rational(static_cast<long long>(deck.size()));
    // Identical cards produce identical sub-trees; enumerating them
    // separately keeps the code one line shorter than grouping would.
    for (std::size_t i = 0; i < deck.size(); ++i) {
        const int card = deck[i];
        const int value = sys.cards[static_cast<size_t>(card)][static_cast<size_t>(var)];
        const bool returned = value == sys.return_value[static_cast<size_t>(var)];
        std::vector<int> next = deck;
        if (!returned) next.erase(next.begin() + static_cast<std::ptrdiff_t>(i));
        outcomes.push_back(value);
        walk(sys, next, steps, depth + 1, outcomes, each, leaves);
        outcomes.pop_back();
    }
}

bool leaf_matches(const Leaf& leaf, const std::vector<std::vector<int>>& accept) {
    for (size_t i = 0; i < accept.size(); ++i) {
        if (accept[i].empty()) continue;
        if (std::find(accept[i].begin(), accept[i].end(), leaf.outcomes[i]) ==
            accept[i].end())
            return false;
    }
    return true;
}

}  // namespace

std::vector<Leaf> enumerate_histories(const ToySystem& sys, const std::vector<int>& steps) {
    check_steps(sys, steps);
    std::vector<int> deck(sys.cards.size());
    for (size_t i = 0; i < deck.size(); ++i) deck[i] = static_cast<int>(i);
    std::vector<Leaf> leaves;
    std::vector<int> outcomes;
    walk(sys, deck, steps, 0, outcomes, Rational(1), leaves);
    return leaves;
}

Rational event_prob(const ToySystem& sys, const std::vector<int>& steps,
                    const std::vector<std::vector<int>>& accept) {
    if (accept.size() != steps.size())
        throw EngineError("accept sets must match the number of steps");
    Rational acc(0);
    for (const Leaf& leaf : enumerate_histories(sys, steps))
        if (leaf_matches(leaf, accept)) acc += leaf.prob;
    return acc;
}

long long simulate_event(const ToySystem& sys, const std::vector<int>& steps,
                         const std::vector<std::vector<int>>& accept, long long n,
                         std::uint64_t seed) {
    check_steps(sys, steps);
    if (accept.size() != steps.size())
        throw EngineError("accept sets must match the number of steps");
    long long hits = 0;
    std::vector<int> deck, outcomes;
    for (long long t = 0; t < n; ++t) {
        CounterRng rng(seed, static_cast<std::uint64_t>(t));
        deck.resize(sys.cards.size());
        for (size_t i = 0; i < deck.size(); ++i) deck[i] = static_cast<int>(i);
        outcomes.clear();
        for (int var : steps) {
            if (deck.empty()) {
                outcomes.push_back(kNoDraw);
                continue;
            }
            const auto i = rng.below(static_cast<std::uint32_t>(deck.size()));
            const int card = deck[i];
            const int value = sys.cards[static_cast<size_t>(card)][static_cast<size_t>(var)];
            if (value != sys.return_value[static_cast<size_t>(var)])
                deck.erase(deck.begin() + static_cast<std::ptrdiff_t>(i));
            outcomes.push_back(value);
        }
        Leaf leaf{outcomes, Rational(0)};
        if (leaf_matches(leaf, accept)) ++hits;
    }
    return hits;
}

ExerciseReport exercise_report() {
    const ToySystem sys = exercise_system();
    const int face = 0, suit = 1;
    const int K = 0, S = 0, H = 1;  // value indices within their variables
    const int Q = 1;

    ExerciseReport rep;
    rep.simultaneity_witness =
        "Draw the K of S and try to observe Face and Suit at once: the Face rule "
        "says return the card (it shows K), the Suit rule says discard it (it "
        "shows S, not H). One card cannot do both, so the two observation "
        "procedures cannot run on the same draw.";

    auto quantity = [&](std::string label, const std::vector<int>& steps,
                        const std::vector<std::vector<int>>& accept) {
        ExerciseQuantity q;
        q.label = std::move(label);
        q.value = event_prob(sys, steps, accept);
        return q;
    };
    auto stated = [](ExerciseQuantity q, long long num, long long den) {
        q.has_stated_value = true;
        q.stated_value = make_ratio(num, den);
        q.discrepancy = q.value != q.stated_value;
        return q;
    };

    rep.order_first = stated(quantity("Pr{K[1] & S[2]}", {face, suit}, {{K}, {S}}), 1, 4);
    rep.order_swapped = stated(quantity("Pr{S[1] & K[2]}", {suit, face}, {{S}, {K}}), 0, 1);
    rep.marginal_via_face =
        stated(quantity("Pr{(K|Q)[1] & K[2]}", {face, face}, {{K, Q}, {K}}), 3, 4);
    rep.marginal_via_suit =
        stated(quantity("Pr{(S|H)[1] & K[2]}", {suit, face}, {{S, H}, {K}}), 0, 1);
    return rep;
}

namespace {

std::string render_value(const ExerciseQuantity& q) {
    std::string out = q.label + " = " + to_fraction_string(q.value);
    if (q.discrepancy)
        out += " (the source text states " + to_fraction_string(q.stated_value) +
               "; the enumeration of the stated rules disagrees -- see "
               "docs/grid-analysis.md)";
    return out;
}

}  // namespace

std::string report_markdown(const ExerciseReport& rep) {
    std::string md;
    md += "# Two-card discard game\n\n";
    md += "Deck {K of S, Q of H}; observing Face returns the card on K, observing\n";
    md += "Suit returns it on H; any other value discards the card.\n\n";
    md += "## 1. No simultaneous observation\n\n" + rep.simultaneity_witness + "\n\n";
    md += "## 2. Order matters\n\n";
    md += "- " + render_value(rep.order_first) + "\n";
    md += "- " + render_value(rep.order_swapped) + "\n\n";
    md += "The two probabilities differ, so no joint distribution over one draw\n";
    md += "can produce both orderings.\n\n";
    md += "## 3. Marginalizing over the first step is ambiguous\n\n";
    md += "- " + render_value(rep.marginal_via_face) + "\n";
    md += "- " + render_value(rep.marginal_via_suit) + "\n\n";
    md += "Both left-hand events are certain one way of reading them, yet the\n";
    md += "sums disagree: Pr{K[2]} depends on which variable was manifested at\n";
    md += "step 1, not only on what was true there.\n";
    return md;
}

std::string report_json(const ExerciseReport& rep) {
    nlohmann::ordered_json j;
    j["system"] = {{"deck", {"K of S", "Q of H"}},
                   {"return_rules", {{"Face", "K"}, {"Suit", "H"}}}};
    j["exercise1"] = {{"witness", rep.simultaneity_witness}};
    auto dump_q = [](const ExerciseQuantity& q) {
        nlohmann::ordered_json o;
        o["label"] = q.label;
        o["value"] = to_fraction_string(q.value);
        o["decimal"] = to_double(q.value);
        if (q.has_stated_value) {
            o["stated"] = to_fraction_string(q.stated_value);
            if (q.discrepancy) {
                o["paper_discrepancy"] = true;
                o["see"] = "docs/grid-analysis.md";
            }
        }
        return o;
    };
    j["exercise2"] = {dump_q(rep.order_first), dump_q(rep.order_swapped)};
    j["exercise3"] = {dump_q(rep.marginal_via_face), dump_q(rep.marginal_via_suit)};
    return j.dump(2) + "\n";
}

}  // namespace decklab::discard
