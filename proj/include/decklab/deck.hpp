#ifndef DECKLAB_DECK_HPP
#define DECKLAB_DECK_HPP

#include "decklab/rational.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace decklab {

// ---------------------------------------------------------------------------
// Construction specs. These mirror the JSON deck format one to one and are
// the convenient way to build decks in code.
// ---------------------------------------------------------------------------

struct VariableSpec {
    std::string name;
    std::vector<std::string> values;  // at least two, all distinct
};

/// A coarse variable defined over an existing one: its values ("classes")
/// partition the base variable's values.
struct DegenerateSpec {
    std::string name;
    std::string over;
    // class name -> member values of the base variable
    std::vector<std::pair<std::string, std::vector<std::string>>> classes;
};

struct CardSpec {
    std::map<std::string, std::string> values;  // variable name -> value name
    long long count = 1;
};

// ---------------------------------------------------------------------------
// Resolved model.
// ---------------------------------------------------------------------------

/// Either a plain variable or a degenerate (coarse) variable. Observation
/// targets throughout the library are expressed as one of these.
struct Target {
    enum class Kind { variable, degenerate };
    Kind kind = Kind::variable;
    int index = 0;

    friend bool operator==(const Target&, const Target&) = default;
};

/// Immutable card-deck system: variables, optional coarse variables, and a
/// multiset of card types. A card type is one full assignment of a value to
/// every variable; `count` says how many physical copies the deck holds.
///
/// Construction performs structural checks (well-formed variables, classes
/// partition their base variable, no duplicate card assignments). Whether
/// the deck satisfies the equal-marginal requirement that makes every
/// variable observable without bias is a separate question answered by
/// validate().
class Deck {
public:
    struct Variable {
        std::string name;
        std::vector<std::string> values;
    };

    struct Degenerate {
        std::string name;
        int over;                              // variable index
        std::vector<std::string> class_names;
        std::vector<std::vector<int>> members; // class -> base value indices
        std::vector<int> class_of_value;       // base value index -> class
    };

    /// Throws DeckError on structural problems.
    static std::shared_ptr<const Deck> create(std::vector<VariableSpec> variables,
                                              std::vector<DegenerateSpec> degenerates,
                                              std::vector<CardSpec> cards);

    // --- shape ------------------------------------------------------------
    int variable_count() const { return static_cast<int>(variables_.size()); }
    int degenerate_count() const { return static_cast<int>(degenerates_.size()); }
    const Variable& variable(int i) const { return variables_[static_cast<size_t>(i)]; }
    const Degenerate& degenerate(int i) const { return degenerates_[static_cast<size_t>(i)]; }

    std::size_t card_type_count() const { return cards_.size(); }
    /// Value indices of card type `c`, one per variable.
    const std::vector<int>& card(std::size_t c) const { return cards_[c]; }
    long long count(std::size_t c) const { return counts_[c]; }
    long long total_count() const { return total_; }

    // --- targets ----------------------------------------------------------
    std::optional<Target> find_target(std::string_view name) const;
    /// Value/class index for `name` under target `t`, or -1.
    int find_outcome(const Target& t, std::string_view name) const;

    int outcome_count(const Target& t) const;
    const std::string& target_name(const Target& t) const;
    const std::string& outcome_name(const Target& t, int outcome) const;
    /// The plain variable a target reads (itself, or the one it coarsens).
    int underlying_variable(const Target& t) const;
    /// Which outcome of `t` card type `c` shows.
    int outcome_of_card(const Target& t, std::size_t c) const;

    // --- counting ---------------------------------------------------------
    /// Total copies showing outcome `o` of target `t`.
    long long marginal_count(const Target& t, int o) const;
    /// N(card)/N: fraction of the deck that is card type `c`.
    Rational normalized_count(std::size_t c) const;
    /// marginal_count / N as an exact fraction.
    Rational marginal_fraction(const Target& t, int o) const;

    /// Physical card list, one entry per copy, in canonical order
    /// (card types sorted by assignment, copies of a type adjacent).
    const std::vector<std::uint16_t>& expansion() const { return expansion_; }

    /// Look up a card type by full assignment; nullopt if absent.
    std::optional<std::size_t> find_card(const std::vector<int>& assignment) const;

    // --- validation -------------------------------------------------------
    struct ValidationReport {
        bool valid = false;
        /// Per-variable card count V_i for valid decks (all equal marginals
        /// imply N = V_i * marginal for every value).
        std::vector<long long> values_per_variable;
        std::vector<std::string> problems;  // human-readable, first is primary
    };

    /// Equal-marginal check: every value of every variable must be held by
    /// the same number of cards. Also rejects empty decks.
    ValidationReport validate() const;

    friend bool operator==(const Deck& a, const Deck& b);

private:
    Deck() = default;

    std::vector<Variable> variables_;
    std::vector<Degenerate> degenerates_;
    std::vector<std::vector<int>> cards_;   // sorted by assignment
    std::vector<long long> counts_;
    long long total_ = 0;
    std::vector<std::vector<long long>> marginals_;      // [var][value]
    std::vector<std::vector<long long>> deg_marginals_;  // [deg][class]
    std::vector<std::uint16_t> expansion_;
};

using DeckPtr = std::shared_ptr<const Deck>;

// ---------------------------------------------------------------------------
// JSON deck files.
// ---------------------------------------------------------------------------

/// Parse a deck from JSON text. Rejects unknown variables in cards,
/// missing assignments, negative counts, malformed degenerate classes.
/// Throws DeckError with a diagnostic naming the offending entity.
DeckPtr deck_from_json(const std::string& text);

/// Load from a file path; errors mention the path.
DeckPtr deck_from_json_file(const std::string& path);

/// Serialize; deck_from_json(deck_to_json(d)) reproduces the deck exactly.
std::string deck_to_json(const Deck& deck);

}  // namespace decklab

#endif
