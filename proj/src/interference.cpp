#include "decklab/interference.hpp"

#include "decklab/errors.hpp"

namespace decklab {

namespace {

void check_class(const Deck& deck, int degenerate, int cls) {
    if (degenerate < 0 || degenerate >= deck.degenerate_count())
        throw InterferenceError("no such degenerate variable");
    const auto& deg = deck.degenerate(degenerate);
    if (cls < 0 || cls >= static_cast<int>(deg.class_names.size()))
        throw InterferenceError("no such class of '" + deg.name + "'");
}

/// Pr{first=o & q} with the conjunction evaluated branch-wise.
Rational conj_prob(const PState& start, const Target& first, int o, const EventStep& q) {
    const auto branches = observe(start, first);
    const ObserveBranch& b = branches[static_cast<size_t>(o)];
    if (b.prob == 0) return Rational(0);
    return b.prob * observe(b.next, q.target)[static_cast<size_t>(q.outcomes.front())].prob;
}

}  // namespace

AdditivityReport check_additivity(const DeckPtr& deck, int degenerate, int cls) {
    check_class(*deck, degenerate, cls);
    const auto& deg = deck->degenerate(degenerate);
    const Target coarse{Target::Kind::degenerate, degenerate};
    const Target base{Target::Kind::variable, deg.over};

    AdditivityReport rep;
    auto check_state = [&](const PState& s) {
        const Rational merged = observe(s, coarse)[static_cast<size_t>(cls)].prob;
        Rational split(0);
        auto branches = observe(s, base);
        for (int v : deg.members[static_cast<size_t>(cls)])
            split += branches[static_cast<size_t>(v)].prob;
        if (merged != split && rep.holds) {
            rep.holds = false;
            rep.witness = s.label;
        }
    };

    check_state(full_state(deck));
    for (int v = 0; v < deck->variable_count(); ++v) {
        const Target t{Target::Kind::variable, v};
        for (int o = 0; o < deck->outcome_count(t); ++o)
            if (deck->marginal_count(t, o) > 0) check_state(prepare(deck, t, o));
    }
    for (int d = 0; d < deck->degenerate_count(); ++d) {
        const Target t{Target::Kind::degenerate, d};
        for (int o = 0; o < deck->outcome_count(t); ++o)
            if (deck->marginal_count(t, o) > 0) check_state(prepare(deck, t, o));
    }
    return rep;
}

Rational interference(const DeckPtr& deck, int degenerate, int cls,
                      const Target& prep_target, int prep_outcome, const EventStep& q) {
    check_class(*deck, degenerate, cls);
    if (q.match != EventStep::Match::single)
        throw InterferenceError("interference is defined against a single later outcome");
    const AdditivityReport add = check_additivity(deck, degenerate, cls);
    if (!add.holds)
        throw InterferenceError("class probabilities are not additive (prepared " +
                                add.witness + "); interference is ill-defined here");

    const auto& deg = deck->degenerate(degenerate);
    const Target coarse{Target::Kind::degenerate, degenerate};
    const Target base{Target::Kind::variable, deg.over};
    const PState start = prepare(deck, prep_target, prep_outcome);

    const Rational merged = conj_prob(start, coarse, cls, q);
    Rational split(0);
    for (int v : deg.members[static_cast<size_t>(cls)])
        split += conj_prob(start, base, v, q);
    return merged - split;
}

Rational interference_closed_form(const DeckPtr& deck, int degenerate, int cls,
                                  const Target& prep_target, int prep_outcome,
                                  const EventStep& q) {
    check_class(*deck, degenerate, cls);
    if (q.match != EventStep::Match::single)
        throw InterferenceError("interference is defined against a single later outcome");
    const auto& deg = deck->degenerate(degenerate);
    const auto& members = deg.members[static_cast<size_t>(cls)];
    if (members.size() != 2)
        throw InterferenceError("the product form needs a two-member class; '" +
                                deg.class_names[static_cast<size_t>(cls)] + "' has " +
                                std::to_string(members.size()));

    const Target base{Target::Kind::variable, deg.over};
    const int t1 = members[0], t2 = members[1];

    // Pr{q | member}: observing q from the member's prepared state.
    auto cond_q = [&](int member) {
        const PState s = prepare(deck, base, member);
        return observe(s, q.target)[static_cast<size_t>(q.outcomes.front())].prob;
    };
    const PState start = prepare(deck, prep_target, prep_outcome);
    auto branches = observe(start, base);
    const Rational da = cond_q(t1) - cond_q(t2);
    const Rational dc =
        branches[static_cast<size_t>(t1)].prob - branches[static_cast<size_t>(t2)].prob;
    return Rational(-1, 2) * da * dc;
}

InterferenceGrid interference_grid(const DeckPtr& deck, int degenerate, int cls,
                                   const Target& prep_target, const Target& q_target) {
    check_class(*deck, degenerate, cls);
    InterferenceGrid grid;
    const int n_prep = deck->outcome_count(prep_target);
    const int n_q = deck->outcome_count(q_target);
    for (int j = 0; j < n_prep; ++j)
        grid.row_labels.push_back(deck->outcome_name(prep_target, j));
    for (int k = 0; k < n_q; ++k)
        grid.col_labels.push_back(deck->outcome_name(q_target, k));
    grid.values.assign(static_cast<size_t>(n_prep),
                       std::vector<Rational>(static_cast<size_t>(n_q)));
    for (int j = 0; j < n_prep; ++j) {
        if (deck->marginal_count(prep_target, j) == 0)
            throw InterferenceError("cannot prepare " + deck->target_name(prep_target) + "=" +
                                    deck->outcome_name(prep_target, j));
        for (int k = 0; k < n_q; ++k) {
            EventStep q;
            q.target = q_target;
            q.match = EventStep::Match::single;
            q.outcomes = {k};
            grid.values[static_cast<size_t>(j)][static_cast<size_t>(k)] =
                interference(deck, degenerate, cls, prep_target, j, q);
        }
    }
    return grid;
}

}  // namespace decklab
