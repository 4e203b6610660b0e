#include "decklab/engine.hpp"

#include "decklab/errors.hpp"

#include <array>
#include <span>

namespace decklab {

PState full_state(const DeckPtr& deck) {
    PState s;
    s.deck = deck;
    s.support.resize(deck->card_type_count());
    for (size_t c = 0; c < deck->card_type_count(); ++c)
        s.support[c] = deck->count(c);
    s.total = deck->total_count();
    s.label = "full deck";
    if (s.total == 0) throw EngineError("empty deck has no states");
    return s;
}

std::vector<ObserveBranch> observe(const PState& s, const Target& t) {
    const Deck& deck = *s.deck;
    if (s.total <= 0) throw EngineError("observe on an empty state");
    const int n_out = deck.outcome_count(t);

    // Chance of each outcome among the cards currently in play.
    std::vector<long long> hits(static_cast<size_t>(n_out), 0);
    for (size_t c = 0; c < deck.card_type_count(); ++c)
        if (s.support[c] > 0)
            hits[static_cast<size_t>(deck.outcome_of_card(t, c))] += s.support[c];

    std::vector<ObserveBranch> branches(static_cast<size_t>(n_out));
    for (int o = 0; o < n_out; ++o) {
        ObserveBranch& b = branches[static_cast<size_t>(o)];
        b.outcome = o;
        b.prob = Rational(BigInt(hits[static_cast<size_t>(o)]), BigInt(s.total));
        if (hits[static_cast<size_t>(o)] == 0) continue;
        // Reporting the outcome rebuilds the sub-deck from the full deck:
        // every copy of every card showing this outcome.
        b.next.deck = s.deck;
        b.next.support.assign(deck.card_type_count(), 0);
        long long total = 0;
        for (size_t c = 0; c < deck.card_type_count(); ++c) {
            if (deck.outcome_of_card(t, c) == o) {
                b.next.support[c] = deck.count(c);
                total += deck.count(c);
            }
        }
        b.next.total = total;
        b.next.label = deck.target_name(t) + "=" + deck.outcome_name(t, o);
    }
    return branches;
}

PState prepare(const DeckPtr& deck, const Target& t, int o) {
    if (o < 0 || o >= deck->outcome_count(t))
        throw EngineError("preparation outcome out of range for " + deck->target_name(t));
    PState s;
    s.deck = deck;
    s.support.assign(deck->card_type_count(), 0);
    for (size_t c = 0; c < deck->card_type_count(); ++c) {
        if (deck->outcome_of_card(t, c) == o) {
            s.support[c] = deck->count(c);
            s.total += deck->count(c);
        }
    }
    if (s.total == 0)
        throw EngineError("cannot prepare " + deck->target_name(t) + "=" +
                          deck->outcome_name(t, o) + ": no card shows that outcome");
    s.label = deck->target_name(t) + "=" + deck->outcome_name(t, o);
    return s;
}

namespace {

Rational eval_steps(const PState& s, std::span<const EventStep> steps) {
    if (steps.empty()) return Rational(1);
    const EventStep& step = steps.front();
    const auto rest = steps.subspan(1);
    auto branches = observe(s, step.target);

    switch (step.match) {
    case EventStep::Match::single: {
        const ObserveBranch& b = branches[static_cast<size_t>(step.outcomes.front())];
        if (b.prob == 0) {
            if (!rest.empty())
                throw UndefinedConditionalError(
                    "sequence continues after an outcome of probability zero (" +
                    s.deck->target_name(step.target) + "=" +
                    s.deck->outcome_name(step.target, step.outcomes.front()) + ")");
            return Rational(0);
        }
        return b.prob * eval_steps(b.next, rest);
    }
    case EventStep::Match::any_of: {
        Rational acc(0);
        for (int o : step.outcomes) {
            const ObserveBranch& b = branches[static_cast<size_t>(o)];
            if (b.prob == 0) continue;
            acc += b.prob * eval_steps(b.next, rest);
        }
        return acc;
    }
    case EventStep::Match::ignored: {
        Rational acc(0);
        for (const ObserveBranch& b : branches) {
            if (b.prob == 0) continue;
            acc += b.prob * eval_steps(b.next, rest);
        }
        return acc;
    }
    }
    throw EngineError("unreachable step kind");
}

void check_step(const Deck& deck, const EventStep& step) {
    const int n_out = deck.outcome_count(step.target);
    switch (step.match) {
    case EventStep::Match::single:
        if (step.outcomes.size() != 1)
            throw EngineError("single-outcome step must carry exactly one outcome");
        break;
    case EventStep::Match::any_of:
        if (step.outcomes.size() < 2)
            throw EngineError("outcome-set step needs at least two outcomes");
        for (size_t i = 0; i < step.outcomes.size(); ++i)
            for (size_t j = i + 1; j < step.outcomes.size(); ++j)
                if (step.outcomes[i] == step.outcomes[j])
                    throw EngineError("outcome-set step repeats an outcome");
        break;
    case EventStep::Match::ignored:
        if (!step.outcomes.empty())
            throw EngineError("ignored step must not carry outcomes");
        break;
    }
    for (int o : step.outcomes)
        if (o < 0 || o >= n_out) throw EngineError("step outcome out of range");
}

}  // namespace

Rational sequence_prob_from(const PState& start, const std::vector<EventStep>& steps) {
    if (steps.empty()) throw EngineError("probability query needs at least one step");
    for (const auto& st : steps) check_step(*start.deck, st);
    return eval_steps(start, std::span<const EventStep>(steps));
}

Rational sequence_prob(const EventSequence& seq) {
    if (!seq.deck) throw EngineError("sequence carries no deck");
    PState start = prepare(seq.deck, seq.prep_target, seq.prep_outcome);
    return sequence_prob_from(start, seq.steps);
}

Rational conditional_prob(const EventSequence& seq, std::size_t given_steps) {
    if (given_steps == 0 || given_steps > seq.steps.size())
        throw EngineError("conditional prefix must cover one to all steps");
    EventSequence prefix = seq;
    prefix.steps.resize(given_steps);
    const Rational denom = sequence_prob(prefix);
    if (denom == 0)
        throw UndefinedConditionalError("conditioning event has probability zero");
    if (given_steps == seq.steps.size()) return Rational(1);
    return sequence_prob(seq) / denom;
}

std::vector<std::vector<Rational>> compatibility_defect(const PState& s,
                                                        const Target& t1,
                                                        const Target& t2) {
    const Deck& deck = *s.deck;
    const int n1 = deck.outcome_count(t1);
    const int n2 = deck.outcome_count(t2);

    auto conj = [](const std::vector<ObserveBranch>& first, int a, const Target& second,
                   int b) -> Rational {
        const ObserveBranch& br = first[static_cast<size_t>(a)];
        if (br.prob == 0) return Rational(0);
        return br.prob * observe(br.next, second)[static_cast<size_t>(b)].prob;
    };

    const auto first1 = observe(s, t1);
    const auto first2 = observe(s, t2);
    std::vector<std::vector<Rational>> defect(
        static_cast<size_t>(n1), std::vector<Rational>(static_cast<size_t>(n2)));
    for (int j = 0; j < n1; ++j)
        for (int k = 0; k < n2; ++k)
            defect[static_cast<size_t>(j)][static_cast<size_t>(k)] =
                conj(first1, j, t2, k) - conj(first2, k, t1, j);
    return defect;
}

SharpnessReport sharpness(const DeckPtr& deck, const Target& t1, const Target& t2) {
    SharpnessReport rep;
    const int n1 = deck->outcome_count(t1);
    const int n2 = deck->outcome_count(t2);

    rep.conditionals.assign(static_cast<size_t>(n1),
                            std::vector<Rational>(static_cast<size_t>(n2)));
    rep.min_distance = Rational(1);
    for (int j = 0; j < n1; ++j) {
        const PState prepped = prepare(deck, t1, j);
        auto branches = observe(prepped, t2);
        for (int k = 0; k < n2; ++k) {
            const Rational p = branches[static_cast<size_t>(k)].prob;
            rep.conditionals[static_cast<size_t>(j)][static_cast<size_t>(k)] = p;
            const Rational dist = p <= Rational(1, 2) ? p : Rational(1) - p;
            if (dist < rep.min_distance) {
                rep.min_distance = dist;
                rep.min_distance_witness = deck->target_name(t1) + "=" +
                                           deck->outcome_name(t1, j) + " then " +
                                           deck->target_name(t2) + "=" +
                                           deck->outcome_name(t2, k);
            }
        }
    }

    rep.max_defect = Rational(0);
    auto scan_state = [&](const PState& s, const std::string& where) {
        auto defect = compatibility_defect(s, t1, t2);
        for (int j = 0; j < n1; ++j)
            for (int k = 0; k < n2; ++k) {
                Rational d = defect[static_cast<size_t>(j)][static_cast<size_t>(k)];
                if (d < 0) d = -d;
                if (d > rep.max_defect) {
                    rep.max_defect = d;
                    rep.max_defect_witness = "from " + where + ": (" +
                                             deck->outcome_name(t1, j) + "," +
                                             deck->outcome_name(t2, k) + ")";
                }
            }
    };
    scan_state(full_state(deck), "full deck");
    for (int j = 0; j < n1; ++j)
        scan_state(prepare(deck, t1, j), deck->target_name(t1) + "=" + deck->outcome_name(t1, j));
    for (int k = 0; k < n2; ++k)
        scan_state(prepare(deck, t2, k), deck->target_name(t2) + "=" + deck->outcome_name(t2, k));
    return rep;
}

Rational marginal_lhs(const PState& start, const Target& mid, const EventStep& q) {
    check_step(*start.deck, q);
    Rational acc(0);
    for (const ObserveBranch& b : observe(start, mid)) {
        if (b.prob == 0) continue;
        acc += b.prob * eval_steps(b.next, std::span<const EventStep>(&q, 1));
    }
    return acc;
}

Rational marginal_rhs(const PState& start, const Target& mid, const EventStep& q) {
    EventStep ignored;
    ignored.target = mid;
    ignored.match = EventStep::Match::ignored;
    return sequence_prob_from(start, {ignored, q});
}

std::string format_step(const Deck& deck, const EventStep& step) {
    const std::string name = deck.target_name(step.target);
    switch (step.match) {
    case EventStep::Match::single:
        return name + "=" + deck.outcome_name(step.target, step.outcomes.front());
    case EventStep::Match::any_of: {
        std::string out = name + "=(";
        for (size_t i = 0; i < step.outcomes.size(); ++i) {
            if (i) out += "|";
            out += deck.outcome_name(step.target, step.outcomes[i]);
        }
        return out + ")";
    }
    case EventStep::Match::ignored:
        return name + "=*";
    }
    return name;
}

std::string format_sequence(const Deck& deck, const EventSequence& seq) {
    std::string out = deck.target_name(seq.prep_target) + "=" +
                      deck.outcome_name(seq.prep_target, seq.prep_outcome) + "; ";
    for (size_t i = 0; i < seq.steps.size(); ++i) {
        if (i) out += " & ";
        out += format_step(deck, seq.steps[i]);
    }
    return out;
}

}  // namespace decklab
