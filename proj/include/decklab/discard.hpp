#ifndef DECKLAB_DISCARD_HPP
#define DECKLAB_DISCARD_HPP

#include "decklab/rational.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace decklab::discard {

/// A deliberately different toy: cards are drawn from a small deck and
/// *consumed* unless they show the variable's designated return value. No
/// equal-marginal requirement, no sub-deck rebuilding -- its whole point is
/// to show order effects with almost no machinery.
struct ToySystem {
    std::vector<std::string> variable_names;
    std::vector<std::vector<std::string>> value_names;  // per variable
    /// Per variable: the value a drawn card must show to be returned to
    /// the deck; any other value means the card is discarded.
    std::vector<int> return_value;
    /// Physical cards, one entry each: value index per variable.
    std::vector<std::vector<int>> cards;
};

/// Outcome code for an observation attempted on an empty deck. The rules
/// never say what that means physically, so it is kept as an explicit
/// terminal outcome rather than an error.
inline constexpr int kNoDraw = -1;

/// The two-card system the exercises use: deck {K of S, Q of H},
/// Face returns on K, Suit returns on H.
ToySystem exercise_system();

/// One full history: the outcome reported at each step (kNoDraw once the
/// deck is empty) and its exact probability.
struct Leaf {
    std::vector<int> outcomes;
    Rational prob;
};

/// Exhaustive enumeration of `steps` observations (each entry names the
/// variable observed at that step): draw uniformly, report, return or
/// discard, recurse. Leaf probabilities sum to exactly 1.
std::vector<Leaf> enumerate_histories(const ToySystem& sys, const std::vector<int>& steps);

/// Probability that step i's outcome lies in accept[i] (empty accept set
/// means "anything, including no-draw"; kNoDraw matches nothing else).
Rational event_prob(const ToySystem& sys, const std::vector<int>& steps,
                    const std::vector<std::vector<int>>& accept);

/// Monte Carlo of the same rules, for cross-checking the enumeration:
/// returns how many of `n` seeded trials matched `accept`.
long long simulate_event(const ToySystem& sys, const std::vector<int>& steps,
                         const std::vector<std::vector<int>>& accept, long long n,
                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// The exercise answers, as data.
// ---------------------------------------------------------------------------

struct ExerciseQuantity {
    std::string label;         // e.g. "Pr{K[1] & S[2]}"
    Rational value;            // enumeration oracle
    bool has_stated_value = false;
    Rational stated_value;     // the value the source text asserts
    bool discrepancy = false;  // oracle != stated
};

struct ExerciseReport {
    /// Exercise 1: simultaneous observation is contradictory on this card.
    std::string simultaneity_witness;
    /// Exercise 2: order asymmetry pair.
    ExerciseQuantity order_first;   // Pr{K[1] & S[2]}
    ExerciseQuantity order_swapped; // Pr{S[1] & K[2]}
    /// Exercise 3: two "marginalizations" of Pr{K[2]} that should agree
    /// but do not -- including the one whose stated value conflicts with
    /// the enumeration.
    ExerciseQuantity marginal_via_face;  // Pr{(K|Q)[1] & K[2]}
    ExerciseQuantity marginal_via_suit;  // Pr{(S|H)[1] & K[2]}
};

ExerciseReport exercise_report();

std::string report_markdown(const ExerciseReport& rep);
std::string report_json(const ExerciseReport& rep);

}  // namespace decklab::discard

#endif
