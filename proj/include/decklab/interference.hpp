#ifndef DECKLAB_INTERFERENCE_HPP
#define DECKLAB_INTERFERENCE_HPP

#include "decklab/deck.hpp"
#include "decklab/engine.hpp"
#include "decklab/rational.hpp"

#include <string>
#include <vector>

namespace decklab {

/// Whether Pr{class} = sum of Pr{member value} holds for a degenerate
/// class in every reachable preparation. For a single observation this is
/// plain additivity of disjoint outcomes and always holds; the report
/// exists so interference calculations can verify their premise instead of
/// assuming it.
struct AdditivityReport {
    bool holds = true;
    std::string witness;  // first failing preparation, if any
};

AdditivityReport check_additivity(const DeckPtr& deck, int degenerate, int cls);

/// Interference of a merged-class observation between a preparation and a
/// later event:
///
///   I = Pr{class & q} - sum over member values t of Pr{t & q}
///
/// from the prepared state. The two terms differ only in the sub-deck the
/// class observation leaves behind: the merged class keeps all cards of
/// the whole class together, the sum rebuilds per member value. Computed
/// from that definition, exactly.
///
/// Throws InterferenceError if `cls` is out of range or additivity fails.
Rational interference(const DeckPtr& deck, int degenerate, int cls,
                      const Target& prep_target, int prep_outcome,
                      const EventStep& q);

/// Closed form for two-member classes {t1, t2}:
///
///   I = -1/2 * (Pr{q|t1} - Pr{q|t2}) * (Pr{t1|prep} - Pr{t2|prep})
///
/// where Pr{q|t} conditions on the prepared member state. Derived by
/// expanding the merged branch over member sub-populations; agrees with
/// the definition on every deck (see docs/grid-analysis.md). Classes with
/// more than two members have no such product form; requesting one throws.
Rational interference_closed_form(const DeckPtr& deck, int degenerate, int cls,
                                  const Target& prep_target, int prep_outcome,
                                  const EventStep& q);

/// Grid of interference values: rows = preparations over `prep_target`'s
/// outcomes, columns = single outcomes of `q_target`.
struct InterferenceGrid {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::vector<Rational>> values;
};

InterferenceGrid interference_grid(const DeckPtr& deck, int degenerate, int cls,
                                   const Target& prep_target, const Target& q_target);

}  // namespace decklab

#endif
