#ifndef DECKLAB_ENGINE_HPP
#define DECKLAB_ENGINE_HPP

#include "decklab/deck.hpp"
#include "decklab/rational.hpp"

#include <string>
#include <vector>

namespace decklab {

/// A probabilistic state of the system: the distribution of the next
/// reported card. Because every successor sub-deck is assembled from the
/// full deck, a state is fully described by per-card-type copy counts.
struct PState {
    DeckPtr deck;
    std::vector<long long> support;  // copies of each card type in play
    long long total = 0;
    std::string label;               // provenance, e.g. "Face=K"

    bool operator==(const PState& o) const {
        return deck == o.deck && support == o.support;
    }
};

/// State holding every card of the full deck.
PState full_state(const DeckPtr& deck);

/// One possible result of observing a target: the outcome's probability in
/// the current state and the state the observation leaves behind. States
/// for zero-probability outcomes are empty and must not be advanced.
struct ObserveBranch {
    int outcome = 0;
    Rational prob;
    PState next;
};

/// Distribution over outcomes of observing `t` in state `s`, with the
/// successor state for each outcome. The successor always holds *all* cards
/// of the full deck showing that outcome -- for a degenerate target, all
/// cards whose base value lies anywhere in the class.
std::vector<ObserveBranch> observe(const PState& s, const Target& t);

/// State after the preparation procedure for outcome `o` of `t` succeeded:
/// the repeat-until loop's fixed point, all matching cards of the full
/// deck. Throws EngineError if no card shows the outcome (the loop could
/// never terminate with it).
PState prepare(const DeckPtr& deck, const Target& t, int o);

// ---------------------------------------------------------------------------
// Event sequences.
// ---------------------------------------------------------------------------

/// One observation step and what counts as success for it:
///  - single:  a named outcome,
///  - any_of:  any outcome in a set (one observation, alternatives summed),
///  - ignored: the observation happens, every outcome counts.
struct EventStep {
    enum class Match { single, any_of, ignored };
    Target target;
    Match match = Match::single;
    std::vector<int> outcomes;  // one entry for single, several for any_of
};

struct EventSequence {
    DeckPtr deck;
    Target prep_target;
    int prep_outcome = 0;
    std::vector<EventStep> steps;
};

/// Probability of seeing each step's outcome in order, starting from the
/// prepared state. Probability-zero branches inside any_of / ignored steps
/// contribute nothing; a probability-zero *single* step makes the rest of
/// the sequence conditionally undefined, so it is an error unless it is the
/// final step (then the sequence probability is plain 0).
Rational sequence_prob(const EventSequence& seq);

/// Same, but starting from an explicit state instead of a preparation.
Rational sequence_prob_from(const PState& start, const std::vector<EventStep>& steps);

/// Pr{steps given the first `given_steps` of them} = ratio of sequence
/// probabilities. Throws UndefinedConditionalError when the condition has
/// probability zero.
Rational conditional_prob(const EventSequence& seq, std::size_t given_steps);

// ---------------------------------------------------------------------------
// Order asymmetry and sharpness.
// ---------------------------------------------------------------------------

/// defect[j][k] = Pr{t1=j & t2=k} - Pr{t2=k & t1=j} from state `s`.
/// All zero iff the two targets commute in that state.
std::vector<std::vector<Rational>> compatibility_defect(const PState& s,
                                                        const Target& t1,
                                                        const Target& t2);

struct SharpnessReport {
    /// conditionals[j][k] = Pr{t2=k right after preparing t1=j}.
    std::vector<std::vector<Rational>> conditionals;
    /// Largest |defect| over all preparations of t1 and t2 and all (j,k).
    Rational max_defect;
    std::string max_defect_witness;
    /// Distance of the conditional matrix from {0,1} entries:
    /// min over entries of min(x, 1-x). Zero would mean some outcome is
    /// fully determined -- "unsharp" observation here keeps it positive
    /// whenever the targets are incompatible.
    Rational min_distance;
    std::string min_distance_witness;
};

SharpnessReport sharpness(const DeckPtr& deck, const Target& t1, const Target& t2);

// ---------------------------------------------------------------------------
// Marginal identity.
// ---------------------------------------------------------------------------

/// lhs: sum over all outcomes t of `mid` of Pr{mid=t & q} from `start`,
/// each conjunction evaluated on its own branch.
Rational marginal_lhs(const PState& start, const Target& mid, const EventStep& q);

/// rhs: Pr{q preceded by an ignored observation of `mid`}, evaluated by the
/// generic sequence machinery. Equal to marginal_lhs for every deck; the
/// point of keeping both routes is that tests can check them against each
/// other.
Rational marginal_rhs(const PState& start, const Target& mid, const EventStep& q);

// ---------------------------------------------------------------------------
// Rendering.
// ---------------------------------------------------------------------------

/// Canonical text form, e.g. "Face=K; Suit=(H|D) & Face=*".
std::string format_sequence(const Deck& deck, const EventSequence& seq);
std::string format_step(const Deck& deck, const EventStep& step);

}  // namespace decklab

#endif
