#ifndef DECKLAB_TESTS_SUPPORT_DECKS_HPP
#define DECKLAB_TESTS_SUPPORT_DECKS_HPP

#include "decklab/deck.hpp"
#include "decklab/engine.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace decklab::test {

/// The 30-card reference deck: cyclic counts 1/4/5 so that every Face and
/// every Suit value is held by exactly 10 cards, plus the Color coarse
/// variable merging H and D.
inline DeckPtr kqj_deck() {
    std::vector<VariableSpec> vars{{"Face", {"K", "Q", "J"}}, {"Suit", {"S", "H", "D"}}};
    std::vector<DegenerateSpec> degs{{"Color", "Suit", {{"R", {"H", "D"}}, {"B", {"S"}}}}};
    std::vector<CardSpec> cards;
    const long long counts[3][3] = {{1, 4, 5}, {4, 5, 1}, {5, 1, 4}};
    const std::string faces[3] = {"K", "Q", "J"};
    const std::string suits[3] = {"S", "H", "D"};
    for (int f = 0; f < 3; ++f)
        for (int s = 0; s < 3; ++s)
            cards.push_back({{{"Face", faces[f]}, {"Suit", suits[s]}}, counts[f][s]});
    return Deck::create(std::move(vars), std::move(degs), std::move(cards));
}

/// Smallest interesting valid deck: two binary variables, correlated.
inline DeckPtr two_value_deck() {
    std::vector<VariableSpec> vars{{"Tone", {"low", "high"}}, {"Mark", {"dot", "bar"}}};
    std::vector<CardSpec> cards{
        {{{"Tone", "low"}, {"Mark", "dot"}}, 3},
        {{{"Tone", "low"}, {"Mark", "bar"}}, 1},
        {{{"Tone", "high"}, {"Mark", "dot"}}, 1},
        {{{"Tone", "high"}, {"Mark", "bar"}}, 3},
    };
    return Deck::create(std::move(vars), {}, std::move(cards));
}

/// A deck on which preparing one variable can never reach some value of
/// the other: {K of S only, Q of H only}. Valid (equal marginals), but the
/// preparation loop for Face=K keeps reproducing Suit=S and Face=K, so
/// e.g. Pr{Face=Q ...} after preparing Face=K is zero everywhere.
inline DeckPtr disconnected_deck(long long copies = 1) {
    std::vector<VariableSpec> vars{{"Face", {"K", "Q"}}, {"Suit", {"S", "H"}}};
    std::vector<CardSpec> cards{
        {{{"Face", "K"}, {"Suit", "S"}}, copies},
        {{{"Face", "Q"}, {"Suit", "H"}}, copies},
    };
    return Deck::create(std::move(vars), {}, std::move(cards));
}

inline Target target(const DeckPtr& deck, const std::string& name) {
    auto t = deck->find_target(name);
    if (!t) throw std::runtime_error("test deck has no target '" + name + "'");
    return *t;
}

inline int outcome(const DeckPtr& deck, const Target& t, const std::string& name) {
    const int o = deck->find_outcome(t, name);
    if (o < 0) throw std::runtime_error("test target has no outcome '" + name + "'");
    return o;
}

inline EventStep step_single(const Target& t, int o) {
    EventStep s;
    s.target = t;
    s.match = EventStep::Match::single;
    s.outcomes = {o};
    return s;
}

inline EventStep step_any(const Target& t, std::vector<int> os) {
    EventStep s;
    s.target = t;
    s.match = EventStep::Match::any_of;
    s.outcomes = std::move(os);
    return s;
}

inline EventStep step_ignored(const Target& t) {
    EventStep s;
    s.target = t;
    s.match = EventStep::Match::ignored;
    return s;
}

// ---------------------------------------------------------------------------
// Random valid decks for property suites.
// ---------------------------------------------------------------------------

/// Every value of every variable must sit on the same number of cards.
/// Layered construction guarantees that by building the deck as a sum of
/// "permutation layers": one layer contributes one card for each value of
/// the first variable, with the other variables' values matched up by
/// random permutations. Each layer raises every marginal by exactly one,
/// so `layers` is the common marginal count and no card type exceeds it.
inline DeckPtr random_valid_deck(std::mt19937_64& gen, bool with_degenerate = true) {
    const int n_values = std::uniform_int_distribution<int>(2, 4)(gen);
    const int n_vars = std::uniform_int_distribution<int>(2, 3)(gen);
    const int layers = std::uniform_int_distribution<int>(1, 6)(gen);

    std::vector<VariableSpec> vars;
    for (int v = 0; v < n_vars; ++v) {
        VariableSpec vs;
        vs.name = "V" + std::to_string(v);
        for (int k = 0; k < n_values; ++k)
            vs.values.push_back("v" + std::to_string(v) + "_" + std::to_string(k));
        vars.push_back(std::move(vs));
    }

    std::map<std::vector<int>, long long> counts;
    std::vector<int> perm(static_cast<size_t>(n_values));
    for (int layer = 0; layer < layers; ++layer) {
        std::vector<std::vector<int>> perms(static_cast<size_t>(n_vars), perm);
        for (int v = 0; v < n_vars; ++v) {
            auto& p = perms[static_cast<size_t>(v)];
            for (int k = 0; k < n_values; ++k) p[static_cast<size_t>(k)] = k;
            if (v > 0) std::shuffle(p.begin(), p.end(), gen);
        }
        for (int k = 0; k < n_values; ++k) {
            std::vector<int> card(static_cast<size_t>(n_vars));
            for (int v = 0; v < n_vars; ++v)
                card[static_cast<size_t>(v)] = perms[static_cast<size_t>(v)][static_cast<size_t>(k)];
            ++counts[card];
        }
    }

    std::vector<CardSpec> cards;
    for (const auto& [assign, count] : counts) {
        CardSpec cs;
        cs.count = count;
        for (int v = 0; v < n_vars; ++v)
            cs.values[vars[static_cast<size_t>(v)].name] =
                vars[static_cast<size_t>(v)].values[static_cast<size_t>(assign[static_cast<size_t>(v)])];
        cards.push_back(std::move(cs));
    }

    std::vector<DegenerateSpec> degs;
    if (with_degenerate) {
        // Merge the first two values of a random variable into one class;
        // the rest become singleton classes.
        const int over = std::uniform_int_distribution<int>(0, n_vars - 1)(gen);
        const auto& base = vars[static_cast<size_t>(over)];
        DegenerateSpec ds;
        ds.name = "D" + std::to_string(over);
        ds.over = base.name;
        if (n_values == 2) {
            ds.classes.push_back({"c0", {base.values[0]}});
            ds.classes.push_back({"c1", {base.values[1]}});
        } else {
            ds.classes.push_back({"c0", {base.values[0], base.values[1]}});
            for (int k = 2; k < n_values; ++k)
                ds.classes.push_back(
                    {"c" + std::to_string(k - 1), {base.values[static_cast<size_t>(k)]}});
        }
        degs.push_back(std::move(ds));
    }

    return Deck::create(std::move(vars), std::move(degs), std::move(cards));
}

}  // namespace decklab::test

#endif
