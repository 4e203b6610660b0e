#include "decklab/simulate.hpp"

#include "decklab/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <thread>

namespace decklab {

const char* variant_name(SystemVariant v) {
    switch (v) {
    case SystemVariant::s: return "s";
    case SystemVariant::s_vi: return "svi";
    case SystemVariant::s_vd: return "svd";
    }
    return "?";
}

std::optional<SystemVariant> variant_from_name(std::string_view name) {
    if (name == "s") return SystemVariant::s;
    if (name == "svi") return SystemVariant::s_vi;
    if (name == "svd") return SystemVariant::s_vd;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// SimTables
// ---------------------------------------------------------------------------

SimTables::SimTables(DeckPtr deck) : deck_(std::move(deck)) {
    const Deck& d = *deck_;
    if (d.total_count() == 0) throw EngineError("cannot simulate an empty deck");

    full_.counts.resize(d.card_type_count());
    for (size_t c = 0; c < d.card_type_count(); ++c) full_.counts[c] = d.count(c);
    full_.expansion = d.expansion();

    const int n_slots = d.variable_count() + d.degenerate_count();
    outcome_of_.resize(static_cast<size_t>(n_slots));
    successors_.resize(static_cast<size_t>(n_slots));
    for (int s = 0; s < n_slots; ++s) {
        const Target t = s < d.variable_count()
                             ? Target{Target::Kind::variable, s}
                             : Target{Target::Kind::degenerate, s - d.variable_count()};
        auto& out_of = outcome_of_[static_cast<size_t>(s)];
        out_of.resize(d.card_type_count());
        auto& succ = successors_[static_cast<size_t>(s)];
        succ.resize(static_cast<size_t>(d.outcome_count(t)));
        for (size_t c = 0; c < d.card_type_count(); ++c) {
            const int o = d.outcome_of_card(t, c);
            out_of[c] = o;
        }
        for (int o = 0; o < d.outcome_count(t); ++o) {
            SubDeck& sub = succ[static_cast<size_t>(o)];
            sub.counts.assign(d.card_type_count(), 0);
            for (size_t c = 0; c < d.card_type_count(); ++c) {
                if (out_of[c] != o) continue;
                sub.counts[c] = d.count(c);
                for (long long i = 0; i < d.count(c); ++i)
                    sub.expansion.push_back(static_cast<std::uint16_t>(c));
            }
        }
    }
}

int SimTables::slot(const Target& t) const {
    if (t.kind == Target::Kind::variable) return t.index;
    return deck_->variable_count() + t.index;
}

// ---------------------------------------------------------------------------
// TrialRunner
// ---------------------------------------------------------------------------

TrialRunner::TrialRunner(const SimTables& tables, SystemVariant variant, DrawMode mode, Rng& rng)
    : tables_(tables), variant_(variant), mode_(mode), rng_(rng) {
    reset();
}

void TrialRunner::reset() {
    base_ = &tables_.full().expansion;
    base_counts_ = &tables_.full().counts;
    order_.clear();
    // Between observations only the shuffle-last variant has a definite
    // top card; fresh from construction that is simply the first card.
    pending_ = variant_ == SystemVariant::s_vd ? static_cast<int>((*base_)[0]) : -1;
}

std::uint16_t TrialRunner::draw_top() {
    if (mode_ == DrawMode::full_shuffle) {
        order_ = *base_;
        shuffle_cards(order_, rng_);
        return order_[0];
    }
    return (*base_)[rng_.below(static_cast<std::uint32_t>(base_->size()))];
}

int TrialRunner::report_and_rebuild(const Target& t, std::uint16_t card) {
    const int slot = tables_.slot(t);
    const int outcome = tables_.outcome_of(slot)[card];
    const SimTables::SubDeck& succ = tables_.successor(slot, outcome);
    base_ = &succ.expansion;
    base_counts_ = &succ.counts;
    return outcome;
}

int TrialRunner::observe(const Target& t) {
    if (variant_ == SystemVariant::s_vd) {
        // Report the standing top card, rebuild, then shuffle so the next
        // top card is already settled while nothing is being observed.
        const int outcome = report_and_rebuild(t, static_cast<std::uint16_t>(pending_));
        if (mode_ == DrawMode::full_shuffle) {
            order_ = *base_;
            shuffle_cards(order_, rng_);
            pending_ = order_[0];
        } else {
            pending_ = (*base_)[rng_.below(static_cast<std::uint32_t>(base_->size()))];
        }
        return outcome;
    }
    return report_and_rebuild(t, draw_top());
}

long long TrialRunner::prepare(const Target& t, int outcome, long long cap) {
    const Deck& deck = *tables_.deck();
    // Something else to observe between attempts: the first plain variable
    // reading a different underlying variable than the prepared one.
    const int under = deck.underlying_variable(t);
    Target other{Target::Kind::variable, -1};
    for (int v = 0; v < deck.variable_count(); ++v) {
        if (v != under) {
            other.index = v;
            break;
        }
    }
    for (long long iter = 1; iter <= cap; ++iter) {
        if (other.index >= 0) observe(other);
        if (observe(t) == outcome) return iter;
    }
    throw IterationCapError("preparation of " + deck.target_name(t) + "=" +
                            deck.outcome_name(t, outcome) + " did not hit within " +
                            std::to_string(cap) + " iterations");
}

std::optional<int> TrialRunner::pending_top() const {
    if (variant_ == SystemVariant::s_vd && pending_ >= 0) return pending_;
    return std::nullopt;
}

std::vector<long long> TrialRunner::support_counts() const { return *base_counts_; }

// ---------------------------------------------------------------------------
// run_chain
// ---------------------------------------------------------------------------

long long& ChainTally::at(std::span<const int> outcomes) {
    if (outcomes.size() != radices.size())
        throw EngineError("outcome tuple arity mismatch");
    std::size_t idx = 0;
    for (size_t i = 0; i < radices.size(); ++i) {
        if (outcomes[i] < 0 || outcomes[i] >= radices[i])
            throw EngineError("outcome tuple digit out of range");
        idx = idx * static_cast<size_t>(radices[i]) + static_cast<size_t>(outcomes[i]);
    }
    return counts[idx];
}

ChainTally run_chain(const DeckPtr& deck, const TrialProtocol& proto, long long n,
                     const SimConfig& cfg) {
    if (n <= 0) throw EngineError("trial count must be positive");
    if (deck->marginal_count(proto.prep_target, proto.prep_outcome) == 0)
        throw EngineError("cannot prepare " + deck->target_name(proto.prep_target) + "=" +
                          deck->outcome_name(proto.prep_target, proto.prep_outcome) +
                          ": no card shows that outcome");

    ChainTally tally;
    std::size_t cells = 1;
    for (const Target& t : proto.chain) {
        const int r = deck->outcome_count(t);
        tally.radices.push_back(r);
        cells *= static_cast<size_t>(r);
        if (cells > (1u << 22))
            throw EngineError("observation chain outcome space too large to tally");
    }
    tally.counts.assign(cells, 0);
    tally.trials = n;

    int threads = cfg.threads > 0 ? cfg.threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (static_cast<long long>(threads) > n) threads = static_cast<int>(n);

    SimTables tables(deck);
    std::vector<std::vector<long long>> locals(static_cast<size_t>(threads),
                                               std::vector<long long>(cells, 0));
    std::vector<long long> local_iters(static_cast<size_t>(threads), 0);
    std::vector<std::exception_ptr> errors(static_cast<size_t>(threads));

    auto worker = [&](int w, long long lo, long long hi) {
        try {
            std::unique_ptr<DeviceRng> dev;
            CounterRng ctr(cfg.seed, 0);
            if (cfg.variant == SystemVariant::s_vi)
                dev = std::make_unique<DeviceRng>(cfg.device_path);
            Rng& rng = dev ? static_cast<Rng&>(*dev) : ctr;
            TrialRunner runner(tables, cfg.variant, cfg.mode, rng);
            auto& local = locals[static_cast<size_t>(w)];
            std::vector<int> digits(proto.chain.size());

            for (long long t = lo; t < hi; ++t) {
                if (!dev) ctr.reset_stream(cfg.seed, static_cast<std::uint64_t>(t));
                runner.reset();
                local_iters[static_cast<size_t>(w)] +=
                    runner.prepare(proto.prep_target, proto.prep_outcome, cfg.prep_cap);
                std::size_t idx = 0;
                for (size_t i = 0; i < proto.chain.size(); ++i) {
                    digits[i] = runner.observe(proto.chain[i]);
                    idx = idx * static_cast<size_t>(tally.radices[i]) +
                          static_cast<size_t>(digits[i]);
                }
                ++local[idx];
            }
        } catch (...) {
            errors[static_cast<size_t>(w)] = std::current_exception();
        }
    };

    if (threads == 1) {
        worker(0, 0, n);
    } else {
        std::vector<std::thread> pool;
        const long long per = n / threads, extra = n % threads;
        long long lo = 0;
        for (int w = 0; w < threads; ++w) {
            const long long hi = lo + per + (w < extra ? 1 : 0);
            pool.emplace_back(worker, w, lo, hi);
            lo = hi;
        }
        for (auto& th : pool) th.join();
    }

    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);

    for (int w = 0; w < threads; ++w) {
        for (size_t i = 0; i < cells; ++i) tally.counts[i] += locals[static_cast<size_t>(w)][i];
        tally.prep_iterations += local_iters[static_cast<size_t>(w)];
    }
    return tally;
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

double QueryResult::stderr_est() const {
    const double p = to_double(exact);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

void check_query_fits(const Deck& deck, const TrialProtocol& proto, const EventSequence& query) {
    if (!(query.prep_target == proto.prep_target) || query.prep_outcome != proto.prep_outcome)
        throw EngineError("query preparation differs from the protocol's");
    if (query.steps.size() > proto.chain.size())
        throw EngineError("query has more steps than the observation chain");
    for (size_t i = 0; i < query.steps.size(); ++i)
        if (!(query.steps[i].target == proto.chain[i]))
            throw EngineError("query step " + std::to_string(i + 1) + " observes '" +
                              deck.target_name(query.steps[i].target) +
                              "' but the chain observes '" + deck.target_name(proto.chain[i]) +
                              "'");
}

std::vector<QueryResult> evaluate_queries(const TrialProtocol& proto, const ChainTally& tally,
                                          std::span<const EventSequence> queries) {
    std::vector<QueryResult> rows;
    rows.reserve(queries.size());
    for (const EventSequence& q : queries) {
        const Deck& deck = *q.deck;
        check_query_fits(deck, proto, q);

        // accept[i][digit]: does outcome `digit` at position i satisfy step i?
        std::vector<std::vector<char>> accept(tally.radices.size());
        for (size_t i = 0; i < tally.radices.size(); ++i) {
            accept[i].assign(static_cast<size_t>(tally.radices[i]), 1);
            if (i < q.steps.size() && q.steps[i].match != EventStep::Match::ignored) {
                accept[i].assign(static_cast<size_t>(tally.radices[i]), 0);
                for (int o : q.steps[i].outcomes) accept[i][static_cast<size_t>(o)] = 1;
            }
        }

        QueryResult row;
        row.sequence = format_sequence(deck, q);
        row.trials = tally.trials;
        row.exact = sequence_prob(q);
        for (size_t idx = 0; idx < tally.counts.size(); ++idx) {
            if (tally.counts[idx] == 0) continue;
            std::size_t rem = idx;
            bool ok = true;
            for (size_t i = tally.radices.size(); i-- > 0;) {
                const auto digit = rem % static_cast<size_t>(tally.radices[i]);
                rem /= static_cast<size_t>(tally.radices[i]);
                if (!accept[i][digit]) {
                    ok = false;
                    break;
                }
            }
            if (ok) row.count += tally.counts[idx];
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

FrequencyTable simulate_sequence(const EventSequence& seq, long long n, const SimConfig& cfg) {
    TrialProtocol proto;
    proto.prep_target = seq.prep_target;
    proto.prep_outcome = seq.prep_outcome;
    for (const EventStep& st : seq.steps) proto.chain.push_back(st.target);

    const ChainTally tally = run_chain(seq.deck, proto, n, cfg);
    FrequencyTable table;
    table.variant = variant_name(cfg.variant);
    table.n = n;
    table.seed = cfg.seed;
    table.rows = evaluate_queries(proto, tally, std::span<const EventSequence>(&seq, 1));
    return table;
}

bool operator==(const FrequencyTable& a, const FrequencyTable& b) {
    if (a.variant != b.variant || a.n != b.n || a.seed != b.seed ||
        a.rows.size() != b.rows.size())
        return false;
    for (size_t i = 0; i < a.rows.size(); ++i) {
        const QueryResult &x = a.rows[i], &y = b.rows[i];
        if (x.sequence != y.sequence || x.count != y.count || x.trials != y.trials ||
            x.exact != y.exact)
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::string to_csv(const FrequencyTable& table) {
    std::string out = "sequence,empirical,exact_num,exact_den,stderr\n";
    for (const QueryResult& row : table.rows) {
        out += row.sequence;
        out += ',';
        out += fmt_double(row.empirical());
        out += ',';
        out += numerator(row.exact).str();
        out += ',';
        out += denominator(row.exact).str();
        out += ',';
        out += fmt_double(row.stderr_est());
        out += '\n';
    }
    return out;
}

std::string to_json(const FrequencyTable& table) {
    nlohmann::ordered_json j;
    j["variant"] = table.variant;
    j["n"] = table.n;
    j["seed"] = table.seed;
    j["rows"] = nlohmann::ordered_json::array();
    for (const QueryResult& row : table.rows) {
        j["rows"].push_back({{"sequence", row.sequence},
                             {"count", row.count},
                             {"trials", row.trials},
                             {"exact_num", numerator(row.exact).str()},
                             {"exact_den", denominator(row.exact).str()},
                             {"empirical", row.empirical()},
                             {"stderr", row.stderr_est()}});
    }
    return j.dump(2) + "\n";
}

FrequencyTable table_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw EngineError(std::string("frequency table is not valid JSON: ") + e.what());
    }
    FrequencyTable table;
    table.variant = j.at("variant").get<std::string>();
    table.n = j.at("n").get<long long>();
    table.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& r : j.at("rows")) {
        QueryResult row;
        row.sequence = r.at("sequence").get<std::string>();
        row.count = r.at("count").get<long long>();
        row.trials = r.at("trials").get<long long>();
        row.exact = Rational(BigInt(r.at("exact_num").get<std::string>()),
                             BigInt(r.at("exact_den").get<std::string>()));
        table.rows.push_back(std::move(row));
    }
    return table;
}

// ---------------------------------------------------------------------------
// Variant agreement
// ---------------------------------------------------------------------------

VariantEquivalence variant_equivalence(const DeckPtr& deck, const TrialProtocol& proto,
                                       std::span<const EventSequence> queries, long long n,
                                       const SimConfig& base_cfg, double alpha) {
    VariantEquivalence eq;
    eq.alpha = alpha;

    const SystemVariant variants[] = {SystemVariant::s, SystemVariant::s_vi,
                                      SystemVariant::s_vd};
    std::vector<ChainTally> tallies;
    for (size_t i = 0; i < 3; ++i) {
        SimConfig cfg = base_cfg;
        cfg.variant = variants[i];
        // Decorrelate the seeded variants' counter streams.
        cfg.seed = mix64(base_cfg.seed ^ (0x51ed2701u + i));
        tallies.push_back(run_chain(deck, proto, n, cfg));

        FrequencyTable table;
        table.variant = variant_name(cfg.variant);
        table.n = n;
        table.seed = cfg.seed;
        table.rows = evaluate_queries(proto, tallies.back(), queries);
        eq.tables.push_back(std::move(table));
    }

    eq.pass = true;
    for (size_t i = 0; i < 3; ++i) {
        for (size_t k = i + 1; k < 3; ++k) {
            VariantEquivalence::PairTest pt;
            pt.first = variant_name(variants[i]);
            pt.second = variant_name(variants[k]);
            pt.chi2 = chi2_homogeneity(tallies[i].counts, tallies[k].counts);
            pt.rejected = pt.chi2.p_value < alpha;
            if (pt.rejected) eq.pass = false;
            eq.pair_tests.push_back(std::move(pt));
        }
    }
    return eq;
}

}  // namespace decklab
