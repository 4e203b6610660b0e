#include "decklab/discard.hpp"

#include "decklab/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace decklab;
using namespace decklab::discard;

namespace {

// Value indices in the exercise system, fixed by exercise_system().
constexpr int kFace = 0, kSuit = 1;
constexpr int K = 0, Q = 1, S = 0, H = 1;

}  // namespace

TEST_SUITE("discard") {

TEST_CASE("the exercise system is the two-card deck with its return rules") {
    const ToySystem sys = exercise_system();
    REQUIRE(sys.variable_names == std::vector<std::string>{"Face", "Suit"});
    REQUIRE(sys.cards == std::vector<std::vector<int>>{{K, S}, {Q, H}});
    CHECK(sys.return_value == std::vector<int>{K, H});
}

TEST_CASE("histories exhaust the sample space exactly") {
    const ToySystem sys = exercise_system();
    for (const auto& steps : std::vector<std::vector<int>>{
             {kFace},
             {kFace, kSuit},
             {kSuit, kFace, kFace},
             {kFace, kFace, kFace, kFace},
             {kFace, kSuit, kFace, kSuit, kFace}}) {
        const auto leaves = enumerate_histories(sys, steps);
        Rational total(0);
        for (const Leaf& leaf : leaves) {
            REQUIRE(leaf.outcomes.size() == steps.size());
            total += leaf.prob;
        }
        CHECK(total == Rational(1));
    }
}

TEST_CASE("order asymmetry, derived by hand") {
    const ToySystem sys = exercise_system();

    // Face first: K (prob 1/2) returns the card, so the deck is intact and
    // Suit shows S with probability 1/2 again.
    CHECK(event_prob(sys, {kFace, kSuit}, {{K}, {S}}) == make_ratio(1, 4));

    // Suit first: S (prob 1/2) discards the K of S, leaving only the Q of
    // H, which can never show K.
    CHECK(event_prob(sys, {kSuit, kFace}, {{S}, {K}}) == Rational(0));
}

TEST_CASE("the two marginalizations of Pr{K at step 2} disagree") {
    const ToySystem sys = exercise_system();

    // Via Face at step 1: the K branch keeps the deck whole (then K again
    // with 1/2), the Q branch discards the Q of H and leaves K certain.
    CHECK(event_prob(sys, {kFace, kFace}, {{K}, {K}}) == make_ratio(1, 4));
    CHECK(event_prob(sys, {kFace, kFace}, {{Q}, {K}}) == make_ratio(1, 2));
    CHECK(event_prob(sys, {kFace, kFace}, {{K, Q}, {K}}) == make_ratio(3, 4));

    // Via Suit at step 1: the S branch kills the only K, the H branch
    // returns the Q of H and leaves the deck whole.
    CHECK(event_prob(sys, {kSuit, kFace}, {{S}, {K}}) == Rational(0));
    CHECK(event_prob(sys, {kSuit, kFace}, {{H}, {K}}) == make_ratio(1, 4));
    CHECK(event_prob(sys, {kSuit, kFace}, {{S, H}, {K}}) == make_ratio(1, 4));

    // Both first events are exhaustive, yet the sums differ: 3/4 vs 1/4.
    // "What was observed" matters even when the result is ignored.
}

TEST_CASE("an emptied deck reports no-draw forever") {
    const ToySystem sys = exercise_system();

    // Q discards one card, S the other; from then on nothing can be drawn.
    CHECK(event_prob(sys, {kFace, kSuit, kFace}, {{Q}, {S}, {}}) == make_ratio(1, 2));
    CHECK(event_prob(sys, {kFace, kSuit, kFace}, {{Q}, {S}, {K}}) == Rational(0));
    CHECK(event_prob(sys, {kFace, kSuit, kFace}, {{Q}, {S}, {Q}}) == Rational(0));

    for (const Leaf& leaf : enumerate_histories(sys, {kFace, kSuit, kFace, kFace})) {
        if (leaf.outcomes[2] == kNoDraw) CHECK(leaf.outcomes[3] == kNoDraw);
        if (leaf.outcomes[0] == Q && leaf.outcomes[1] == S)
            CHECK(leaf.outcomes[2] == kNoDraw);
    }
}

TEST_CASE("empty accept sets match anything, and arities are enforced") {
    const ToySystem sys = exercise_system();
    CHECK(event_prob(sys, {kFace, kSuit}, {{}, {}}) == Rational(1));
    CHECK(event_prob(sys, {kFace, kSuit}, {{K}, {}}) == make_ratio(1, 2));

    CHECK_THROWS_AS(event_prob(sys, {kFace, kSuit}, {{K}}), EngineError);
    CHECK_THROWS_AS(enumerate_histories(sys, {kFace, 2}), EngineError);
    CHECK_THROWS_AS(enumerate_histories(sys, {-1}), EngineError);
    CHECK_THROWS_AS(simulate_event(sys, {kFace}, {{K}, {S}}, 10, 1), EngineError);
}

TEST_CASE("duplicate physical cards just weight their branch") {
    ToySystem sys = exercise_system();
    sys.cards.push_back({K, S});  // second identical K of S
    CHECK(event_prob(sys, {kFace}, {{K}}) == make_ratio(2, 3));
    // Suit=S discards one of the two K cards; a K at step 2 is still
    // available from the other.
    CHECK(event_prob(sys, {kSuit, kFace}, {{S}, {K}}) == make_ratio(1, 3));

    Rational total(0);
    for (const Leaf& leaf : enumerate_histories(sys, {kFace, kSuit, kFace}))
        total += leaf.prob;
    CHECK(total == Rational(1));
}

TEST_CASE("seeded simulation reproduces the enumeration within noise") {
    const ToySystem sys = exercise_system();
    const long long n = 100000;

    auto within = [&](const std::vector<int>& steps,
                      const std::vector<std::vector<int>>& accept, double p) {
        const long long hits = simulate_event(sys, steps, accept, n, 20260819);
        const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
        return std::abs(static_cast<double>(hits) / static_cast<double>(n) - p) <
               4 * sigma;
    };
    CHECK(within({kFace, kSuit}, {{K}, {S}}, 0.25));
    CHECK(within({kFace, kFace}, {{K, Q}, {K}}, 0.75));
    CHECK(within({kSuit, kFace}, {{S, H}, {K}}, 0.25));
    CHECK(simulate_event(sys, {kSuit, kFace}, {{S}, {K}}, n, 3) == 0);

    // Trials are addressed by a counter stream, so the count is a pure
    // function of the seed.
    CHECK(simulate_event(sys, {kFace, kSuit}, {{K}, {S}}, 5000, 8) ==
          simulate_event(sys, {kFace, kSuit}, {{K}, {S}}, 5000, 8));
}

TEST_CASE("the exercise report freezes all four answers") {
    const ExerciseReport rep = exercise_report();

    CHECK(rep.simultaneity_witness.find("K of S") != std::string::npos);

    CHECK(rep.order_first.value == make_ratio(1, 4));
    CHECK(!rep.order_first.discrepancy);
    CHECK(rep.order_swapped.value == Rational(0));
    CHECK(!rep.order_swapped.discrepancy);
    CHECK(rep.marginal_via_face.value == make_ratio(3, 4));
    CHECK(!rep.marginal_via_face.discrepancy);

    // The fourth quantity is where the enumeration contradicts the value
    // the source text asserts: 1/4 against a stated 0.
    CHECK(rep.marginal_via_suit.value == make_ratio(1, 4));
    CHECK(rep.marginal_via_suit.has_stated_value);
    CHECK(rep.marginal_via_suit.stated_value == Rational(0));
    CHECK(rep.marginal_via_suit.discrepancy);
}

TEST_CASE("rendered reports carry the values and flag the disputed one") {
    const ExerciseReport rep = exercise_report();

    const std::string md = report_markdown(rep);
    CHECK(md.find("Pr{K[1] & S[2]} = 1/4") != std::string::npos);
    CHECK(md.find("Pr{S[1] & K[2]} = 0") != std::string::npos);
    CHECK(md.find("Pr{(K|Q)[1] & K[2]} = 3/4") != std::string::npos);
    CHECK(md.find("Pr{(S|H)[1] & K[2]} = 1/4") != std::string::npos);
    CHECK(md.find("the source text states 0") != std::string::npos);
    CHECK(md.find("docs/grid-analysis.md") != std::string::npos);

    const std::string js = report_json(rep);
    CHECK(js.find("\"paper_discrepancy\": true") != std::string::npos);
    CHECK(js.find("\"see\": \"docs/grid-analysis.md\"") != std::string::npos);
    // Exactly one quantity is disputed.
    std::size_t flags = 0, pos = 0;
    while ((pos = js.find("paper_discrepancy", pos)) != std::string::npos) {
        ++flags;
        ++pos;
    }
    CHECK(flags == 1);
}

}  // TEST_SUITE
