#ifndef DECKLAB_SIMULATE_HPP
#define DECKLAB_SIMULATE_HPP

#include "decklab/deck.hpp"
#include "decklab/engine.hpp"
#include "decklab/entropy.hpp"
#include "decklab/rational.hpp"
#include "decklab/stats.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace decklab {

/// The three mechanical realizations of the observation procedure.
///  - s:    shuffle, report top, rebuild sub-deck; seeded deterministic RNG.
///  - s_vi: identical procedure driven by an OS entropy device.
///  - s_vd: report top, rebuild, then shuffle -- the next top card is fixed
///          while the system sits between observations.
enum class SystemVariant { s, s_vi, s_vd };

const char* variant_name(SystemVariant v);
std::optional<SystemVariant> variant_from_name(std::string_view name);

/// How a shuffle is realized.
///  - full_shuffle: a literal uniform permutation of the sub-deck.
///  - top_draw:     only the card the shuffle would put on top is drawn
///                  (uniformly). Nothing observable depends on the rest of
///                  the order -- the sub-deck is rebuilt from scratch before
///                  any further card is consumed -- so the reported
///                  sequences have exactly the same distribution. Roughly
///                  an order of magnitude faster.
enum class DrawMode { full_shuffle, top_draw };

struct SimConfig {
    SystemVariant variant = SystemVariant::s;
    DrawMode mode = DrawMode::full_shuffle;
    std::uint64_t seed = 1;
    /// Preparation loops exceeding this many iterations abort the run.
    long long prep_cap = 1000000;
    /// Worker threads; 0 means one per hardware thread.
    int threads = 1;
    /// Entropy device for s_vi.
    std::string device_path = "/dev/urandom";
};

// ---------------------------------------------------------------------------
// Precomputed card tables.
// ---------------------------------------------------------------------------

/// Per-target lookup tables: outcome of every card type, and for every
/// outcome the rebuilt sub-deck (expansion and per-type counts). Successor
/// sub-decks never depend on anything but the outcome, so they are shared
/// across all trials.
class SimTables {
public:
    explicit SimTables(DeckPtr deck);

    const DeckPtr& deck() const { return deck_; }
    int slot(const Target& t) const;

    struct SubDeck {
        std::vector<std::uint16_t> expansion;
        std::vector<long long> counts;
    };

    const std::vector<int>& outcome_of(int slot) const { return outcome_of_[static_cast<size_t>(slot)]; }
    const SubDeck& successor(int slot, int outcome) const {
        return successors_[static_cast<size_t>(slot)][static_cast<size_t>(outcome)];
    }
    const SubDeck& full() const { return full_; }

private:
    DeckPtr deck_;
    std::vector<std::vector<int>> outcome_of_;        // [slot][card type]
    std::vector<std::vector<SubDeck>> successors_;    // [slot][outcome]
    SubDeck full_;
};

// ---------------------------------------------------------------------------
// Single-trial machinery.
// ---------------------------------------------------------------------------

/// Drives one trial card by card. Exposed so tests can probe mechanical
/// details the aggregate runner hides: the pending top card between
/// observations (s_vd), the sub-deck multiset, the literal shuffled order.
class TrialRunner {
public:
    TrialRunner(const SimTables& tables, SystemVariant variant, DrawMode mode, Rng& rng);

    /// Back to the full deck in construction order.
    void reset();

    /// One observation of `t`; returns the outcome index.
    int observe(const Target& t);

    /// Repeat {observe some other variable, observe `t`} until `t` shows
    /// `outcome`. Returns the number of loop iterations used. Throws
    /// IterationCapError beyond `cap` iterations.
    long long prepare(const Target& t, int outcome, long long cap);

    /// Card type currently face-up on top, when that is defined: only the
    /// s_vd variant leaves a definite top card between observations.
    std::optional<int> pending_top() const;

    /// Copy counts of the current sub-deck, aligned with card types.
    std::vector<long long> support_counts() const;

    /// The most recent literal shuffle result (full_shuffle mode only):
    /// under s/s_vi the order that produced the last outcome, under s_vd
    /// the standing order awaiting the next observation.
    const std::vector<std::uint16_t>& shuffled_order() const { return order_; }

private:
    int report_and_rebuild(const Target& t, std::uint16_t card);
    std::uint16_t draw_top();

    const SimTables& tables_;
    SystemVariant variant_;
    DrawMode mode_;
    Rng& rng_;
    const std::vector<std::uint16_t>* base_;    // current sub-deck, canonical order
    const std::vector<long long>* base_counts_;
    std::vector<std::uint16_t> order_;          // owned shuffle buffer
    int pending_ = -1;                          // card type on top, -1 undefined
};

// ---------------------------------------------------------------------------
// Aggregate runs.
// ---------------------------------------------------------------------------

/// A preparation followed by a fixed chain of observations. Every trial
/// records the full outcome tuple; queries are evaluated on the tally.
struct TrialProtocol {
    Target prep_target;
    int prep_outcome = 0;
    std::vector<Target> chain;
};

struct ChainTally {
    std::vector<int> radices;       // outcomes per chain position
    std::vector<long long> counts;  // dense mixed-radix histogram
    long long trials = 0;
    long long prep_iterations = 0;  // total across trials

    long long& at(std::span<const int> outcomes);
};

/// Runs `n` independent trials. With a seeded source, trial i draws from
/// its own counter stream (seed, i), so the tally is a pure function of
/// (deck, protocol, n, seed) no matter how many threads run it.
ChainTally run_chain(const DeckPtr& deck, const TrialProtocol& proto, long long n,
                     const SimConfig& cfg);

// ---------------------------------------------------------------------------
// Frequency tables.
// ---------------------------------------------------------------------------

struct QueryResult {
    std::string sequence;   // canonical text form
    long long count = 0;    // trials matching
    long long trials = 0;
    Rational exact;         // engine value for the same sequence
    double empirical() const {
        return static_cast<double>(count) / static_cast<double>(trials);
    }
    /// Binomial standard error sqrt(p(1-p)/n) at the exact p.
    double stderr_est() const;
};

struct FrequencyTable {
    std::string variant;
    long long n = 0;
    std::uint64_t seed = 0;
    std::vector<QueryResult> rows;
};

bool operator==(const FrequencyTable& a, const FrequencyTable& b);

/// Check that a query can be answered from a protocol's tally: same
/// preparation, steps matching the chain's targets position by position
/// (the chain may be longer; the tail is summed out). Throws EngineError
/// otherwise.
void check_query_fits(const Deck& deck, const TrialProtocol& proto, const EventSequence& query);

/// Evaluate queries against a finished tally.
std::vector<QueryResult> evaluate_queries(const TrialProtocol& proto, const ChainTally& tally,
                                          std::span<const EventSequence> queries);

/// One-call convenience: run the protocol implied by a single parsed
/// sequence (chain = its step targets) and tabulate that sequence.
FrequencyTable simulate_sequence(const EventSequence& seq, long long n, const SimConfig& cfg);

/// sequence,empirical,exact_num,exact_den,stderr
std::string to_csv(const FrequencyTable& table);
/// JSON object carrying everything, including counts; parses back equal.
std::string to_json(const FrequencyTable& table);
FrequencyTable table_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// Variant agreement.
// ---------------------------------------------------------------------------

/// Runs the same protocol under all three variants and compares the full
/// outcome-tuple histograms pairwise with two-sample homogeneity tests.
/// `pass` means no pair rejected at `alpha`.
struct VariantEquivalence {
    struct PairTest {
        std::string first, second;
        Chi2Result chi2;
        bool rejected = false;
    };
    std::vector<FrequencyTable> tables;  // per variant, same query rows
    std::vector<PairTest> pair_tests;
    double alpha = 0.001;
    bool pass = false;
};

VariantEquivalence variant_equivalence(const DeckPtr& deck, const TrialProtocol& proto,
                                       std::span<const EventSequence> queries, long long n,
                                       const SimConfig& base_cfg, double alpha = 0.001);

}  // namespace decklab

#endif
