#include "decklab/deck.hpp"
#include "decklab/discard.hpp"
#include "decklab/engine.hpp"
#include "decklab/errors.hpp"
#include "decklab/interference.hpp"
#include "decklab/parser.hpp"
#include "decklab/quantum.hpp"
#include "decklab/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace decklab;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Shared rendering helpers.
// ---------------------------------------------------------------------------

std::string rat(const Rational& r) {
    return to_fraction_string(r) + " (" + to_decimal_string(r) + ")";
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << content;
}

/// "Var=Value" -> (target, outcome). Offsets in errors refer to `text`.
std::pair<Target, int> parse_assignment(const Deck& deck, const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos)
        throw ParseError(text.size(), "expected VAR=VALUE in '" + text + "'");
    const std::string var = text.substr(0, eq);
    const std::string val = text.substr(eq + 1);
    auto target = deck.find_target(var);
    if (!target) throw ParseError(0, "unknown variable '" + var + "'");
    const int outcome = deck.find_outcome(*target, val);
    if (outcome < 0)
        throw ParseError(eq + 1,
                         "'" + val + "' is not a value of '" + deck.target_name(*target) + "'");
    return {*target, outcome};
}

struct GridView {
    std::string title;
    std::vector<std::string> row_labels, col_labels;
    std::vector<std::vector<Rational>> values;
    bool reference_mismatch = false;  // known-bad published reference values
};

std::string render_grid_text(const GridView& g) {
    std::string out = g.title + "\n";
    size_t row_w = 4;
    for (const auto& r : g.row_labels) row_w = std::max(row_w, r.size());
    std::vector<size_t> col_w(g.col_labels.size());
    std::vector<std::vector<std::string>> cells(g.values.size());
    for (size_t i = 0; i < g.values.size(); ++i) {
        cells[i].resize(g.values[i].size());
        for (size_t j = 0; j < g.values[i].size(); ++j)
            cells[i][j] = rat(g.values[i][j]);
    }
    for (size_t j = 0; j < g.col_labels.size(); ++j) {
        col_w[j] = g.col_labels[j].size();
        for (size_t i = 0; i < cells.size(); ++i)
            col_w[j] = std::max(col_w[j], cells[i][j].size());
    }
    auto pad = [](const std::string& s, size_t w) {
        return s + std::string(w - s.size(), ' ');
    };
    out += pad("", row_w);
    for (size_t j = 0; j < g.col_labels.size(); ++j)
        out += "  " + pad(g.col_labels[j], col_w[j]);
    out += "\n";
    for (size_t i = 0; i < g.row_labels.size(); ++i) {
        out += pad(g.row_labels[i], row_w);
        for (size_t j = 0; j < cells[i].size(); ++j) out += "  " + pad(cells[i][j], col_w[j]);
        out += "\n";
    }
    if (g.reference_mismatch)
        out += "note: published reference values for this family of grids are "
               "inconsistent with their defining formula; values above follow the "
               "formula. See docs/grid-analysis.md.\n";
    return out;
}

ordered_json grid_json(const GridView& g) {
    ordered_json j;
    j["title"] = g.title;
    j["rows"] = g.row_labels;
    j["cols"] = g.col_labels;
    j["values"] = ordered_json::array();
    for (const auto& row : g.values) {
        ordered_json jrow = ordered_json::array();
        for (const auto& v : row)
            jrow.push_back({{"value", to_fraction_string(v)}, {"decimal", to_double(v)}});
        j["values"].push_back(jrow);
    }
    if (g.reference_mismatch) {
        j["paper_discrepancy"] = true;
        j["see"] = "docs/grid-analysis.md";
    }
    return j;
}

std::string grid_csv(const GridView& g, const std::string& id) {
    std::string out;
    for (size_t i = 0; i < g.row_labels.size(); ++i)
        for (size_t j = 0; j < g.col_labels.size(); ++j) {
            const Rational& v = g.values[i][j];
            out += id + "," + g.row_labels[i] + "," + g.col_labels[j] + "," +
                   numerator(v).str() + "," + denominator(v).str() + "," +
                   to_decimal_string(v) + "\n";
        }
    return out;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int cmd_validate(const std::string& deck_path) {
    const DeckPtr deck = deck_from_json_file(deck_path);
    const auto rep = deck->validate();
    if (rep.valid) {
        std::cout << "ok: " << deck->total_count() << " cards, " << deck->variable_count()
                  << " variable(s)";
        if (deck->degenerate_count() > 0)
            std::cout << ", " << deck->degenerate_count() << " degenerate";
        std::cout << "\n";
        for (int v = 0; v < deck->variable_count(); ++v) {
            const Target t{Target::Kind::variable, v};
            std::cout << "  " << deck->variable(v).name << ": every value held by "
                      << deck->marginal_count(t, 0) << " cards\n";
        }
        return 0;
    }
    std::cout << "invalid deck:\n";
    for (const auto& p : rep.problems) std::cout << "  - " << p << "\n";
    return 2;
}

// ---------------------------------------------------------------------------
// tables
// ---------------------------------------------------------------------------

std::vector<GridView> conditional_grids(const DeckPtr& deck) {
    std::vector<GridView> grids;
    for (int a = 0; a < deck->variable_count(); ++a) {
        for (int b = a + 1; b < deck->variable_count(); ++b) {
            const Target p{Target::Kind::variable, a}, q{Target::Kind::variable, b};
            const auto rep = sharpness(deck, p, q);
            GridView g;
            g.title = "conditional probabilities: Pr{" + deck->variable(b).name +
                      " | prepared " + deck->variable(a).name + "}";
            for (const auto& v : deck->variable(a).values) g.row_labels.push_back(v);
            for (const auto& v : deck->variable(b).values) g.col_labels.push_back(v);
            g.values = rep.conditionals;
            grids.push_back(std::move(g));
        }
    }
    return grids;
}

std::vector<GridView> defect_grids(const DeckPtr& deck) {
    std::vector<GridView> grids;
    for (int a = 0; a < deck->variable_count(); ++a) {
        for (int b = a + 1; b < deck->variable_count(); ++b) {
            const Target p{Target::Kind::variable, a}, q{Target::Kind::variable, b};
            for (int o = 0; o < deck->outcome_count(p); ++o) {
                GridView g;
                g.title = "order defect from prepared " + deck->variable(a).name + "=" +
                          deck->outcome_name(p, o) + ": Pr{" + deck->variable(a).name +
                          " & " + deck->variable(b).name + "} - Pr{" +
                          deck->variable(b).name + " & " + deck->variable(a).name + "}";
                for (const auto& v : deck->variable(a).values) g.row_labels.push_back(v);
                for (const auto& v : deck->variable(b).values) g.col_labels.push_back(v);
                g.values = compatibility_defect(prepare(deck, p, o), p, q);
                g.reference_mismatch = true;
                grids.push_back(std::move(g));
            }
        }
    }
    return grids;
}

std::vector<GridView> ignored_marginal_grids(const DeckPtr& deck) {
    std::vector<GridView> grids;
    // Middles: every target whose underlying variable differs from P.
    for (int a = 0; a < deck->variable_count(); ++a) {
        const Target p{Target::Kind::variable, a};
        auto emit = [&](const Target& mid) {
            GridView g;
            g.title = "ignored-step marginal minus direct: Pr{" +
                      deck->target_name(mid) + "=* & " + deck->variable(a).name +
                      "} - Pr{" + deck->variable(a).name + "}, per preparation of " +
                      deck->variable(a).name;
            const int n = deck->outcome_count(p);
            for (int j = 0; j < n; ++j) g.row_labels.push_back(deck->outcome_name(p, j));
            for (int k = 0; k < n; ++k) g.col_labels.push_back(deck->outcome_name(p, k));
            g.values.assign(static_cast<size_t>(n), std::vector<Rational>(static_cast<size_t>(n)));
            for (int j = 0; j < n; ++j) {
                const PState s = prepare(deck, p, j);
                auto direct = observe(s, p);
                for (int k = 0; k < n; ++k) {
                    EventStep qs;
                    qs.target = p;
                    qs.match = EventStep::Match::single;
                    qs.outcomes = {k};
                    g.values[static_cast<size_t>(j)][static_cast<size_t>(k)] =
                        marginal_rhs(s, mid, qs) - direct[static_cast<size_t>(k)].prob;
                }
            }
            g.reference_mismatch = true;
            grids.push_back(std::move(g));
        };
        for (int m = 0; m < deck->variable_count(); ++m)
            if (m != a) emit(Target{Target::Kind::variable, m});
        for (int d = 0; d < deck->degenerate_count(); ++d)
            if (deck->degenerate(d).over != a) emit(Target{Target::Kind::degenerate, d});
    }
    return grids;
}

std::vector<GridView> interference_grids(const DeckPtr& deck) {
    std::vector<GridView> grids;
    for (int d = 0; d < deck->degenerate_count(); ++d) {
        const auto& deg = deck->degenerate(d);
        for (size_t cls = 0; cls < deg.class_names.size(); ++cls) {
            for (int a = 0; a < deck->variable_count(); ++a) {
                if (a == deg.over) continue;
                const Target p{Target::Kind::variable, a};
                const auto grid =
                    interference_grid(deck, d, static_cast<int>(cls), p, p);
                GridView g;
                g.title = "interference of merged class " + deg.name + "=" +
                          deg.class_names[cls] + " between preparation and a later " +
                          deck->variable(a).name + " value";
                g.row_labels = grid.row_labels;
                g.col_labels = grid.col_labels;
                g.values = grid.values;
                grids.push_back(std::move(g));
            }
        }
    }
    return grids;
}

int cmd_tables(const std::string& deck_path, const std::string& format,
               const std::string& out_path) {
    const DeckPtr deck = deck_from_json_file(deck_path);
    const auto rep = deck->validate();
    if (!rep.valid) {
        std::cerr << "invalid deck: " << rep.problems.front() << "\n";
        return 2;
    }

    struct Section {
        std::string id;
        std::vector<GridView> grids;
    };
    std::vector<Section> sections;
    sections.push_back({"conditional", conditional_grids(deck)});
    sections.push_back({"order_defect", defect_grids(deck)});
    sections.push_back({"ignored_marginal", ignored_marginal_grids(deck)});
    sections.push_back({"interference", interference_grids(deck)});

    std::string out;
    if (format == "json") {
        ordered_json j;
        j["deck"] = deck_path;
        for (const auto& sec : sections) {
            j[sec.id] = ordered_json::array();
            for (const auto& g : sec.grids) j[sec.id].push_back(grid_json(g));
        }
        out = j.dump(2) + "\n";
    } else if (format == "csv") {
        out = "table,row,col,exact_num,exact_den,decimal\n";
        for (const auto& sec : sections) {
            for (size_t i = 0; i < sec.grids.size(); ++i)
                out += grid_csv(sec.grids[i],
                                sec.id + (sec.grids.size() > 1 ? ":" + std::to_string(i) : ""));
        }
    } else {
        for (const auto& sec : sections)
            for (const auto& g : sec.grids) out += render_grid_text(g) + "\n";
    }
    write_output(out_path, out);
    return 0;
}

// ---------------------------------------------------------------------------
// prob
// ---------------------------------------------------------------------------

int cmd_prob(const std::string& deck_path, const std::string& expr) {
    const DeckPtr deck = deck_from_json_file(deck_path);
    const EventSequence seq = parse_sequence(deck, expr);
    const Rational p = sequence_prob(seq);
    std::cout << format_sequence(*deck, seq) << "\n= " << rat(p) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string deck_path, expr, format = "csv", out_path, variant = "s";
    std::string mode = "shuffle", device = "/dev/urandom";
    long long n = 100000;
    std::uint64_t seed = 1;
    long long prep_cap = 1000000;
    int threads = 0;
};

int cmd_simulate(const SimulateArgs& args) {
    if (args.n <= 0) {
        std::cerr << "simulate: --n must be at least 1\n";
        return 2;
    }
    const DeckPtr deck = deck_from_json_file(args.deck_path);
    const EventSequence seq = parse_sequence(deck, args.expr);

    SimConfig cfg;
    const auto variant = variant_from_name(args.variant);
    if (!variant) {
        std::cerr << "simulate: unknown variant '" << args.variant << "'\n";
        return 2;
    }
    cfg.variant = *variant;
    if (args.mode == "draw")
        cfg.mode = DrawMode::top_draw;
    else if (args.mode == "shuffle")
        cfg.mode = DrawMode::full_shuffle;
    else {
        std::cerr << "simulate: unknown mode '" << args.mode << "'\n";
        return 2;
    }
    cfg.seed = args.seed;
    cfg.prep_cap = args.prep_cap;
    cfg.threads = args.threads;
    cfg.device_path = args.device;

    const FrequencyTable table = simulate_sequence(seq, args.n, cfg);
    write_output(args.out_path, args.format == "json" ? to_json(table) : to_csv(table));
    return 0;
}

// ---------------------------------------------------------------------------
// interfere
// ---------------------------------------------------------------------------

int cmd_interfere(const std::string& deck_path, const std::string& cls_arg,
                  const std::string& prep_arg, const std::string& q_arg) {
    const DeckPtr deck = deck_from_json_file(deck_path);
    if (deck->degenerate_count() == 0) {
        std::cerr << "interfere: the deck defines no degenerate variable\n";
        return 2;
    }

    // --class Color=R
    const auto eq = cls_arg.find('=');
    if (eq == std::string::npos)
        throw ParseError(cls_arg.size(), "expected DEGENERATE=CLASS in '" + cls_arg + "'");
    int deg = -1, cls = -1;
    for (int d = 0; d < deck->degenerate_count(); ++d)
        if (deck->degenerate(d).name == cls_arg.substr(0, eq)) deg = d;
    if (deg < 0) throw ParseError(0, "unknown degenerate variable in '" + cls_arg + "'");
    const Target deg_t{Target::Kind::degenerate, deg};
    cls = deck->find_outcome(deg_t, cls_arg.substr(eq + 1));
    if (cls < 0) throw ParseError(eq + 1, "unknown class in '" + cls_arg + "'");

    const auto [prep_t, prep_o] = parse_assignment(*deck, prep_arg);
    const auto [q_t, q_o] = parse_assignment(*deck, q_arg);
    EventStep q;
    q.target = q_t;
    q.match = EventStep::Match::single;
    q.outcomes = {q_o};

    const Rational def = interference(deck, deg, cls, prep_t, prep_o, q);
    std::cout << "interference of " << cls_arg << " between " << prep_arg << " and " << q_arg
              << ":\n  definition: " << rat(def) << "\n";
    const auto& members = deck->degenerate(deg).members[static_cast<size_t>(cls)];
    if (members.size() == 2) {
        const Rational cf = interference_closed_form(deck, deg, cls, prep_t, prep_o, q);
        std::cout << "  product form: " << rat(cf)
                  << (cf == def ? "  [agrees]" : "  [DISAGREES]") << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// exercises
// ---------------------------------------------------------------------------

int cmd_exercises(const std::string& format, const std::string& out_path) {
    const auto rep = discard::exercise_report();
    write_output(out_path,
                 format == "json" ? discard::report_json(rep) : discard::report_markdown(rep));
    return 0;
}

// ---------------------------------------------------------------------------
// quantum
// ---------------------------------------------------------------------------

int cmd_quantum(std::vector<int> dims, long long trials, std::uint64_t seed,
                const std::string& format) {
    if (dims.empty()) dims = {2, 3, 4, 5};
    const auto report = quantum::theorem_fuzz(dims, trials, seed);

    // The worked d=2 example: bases at angle pi/4, state (|0>+|1>)/sqrt(2).
    quantum::Mat pb(2, 2), qb(2, 2);
    pb << 1, 0, 0, 1;
    const double c = std::sqrt(0.5);
    qb << c, -c, c, c;
    quantum::Vec psi(2);
    psi << c, c;
    const auto mc = quantum::margenau_check(psi, quantum::ProjectorFamily(pb),
                                            quantum::ProjectorFamily(qb));

    if (format == "json") {
        ordered_json j;
        j["fuzz"] = ordered_json::array();
        for (const auto& d : report.per_dim)
            j["fuzz"].push_back({{"dim", d.dim},
                                 {"trials", d.compatible + d.incompatible + d.boundary + d.failures},
                                 {"compatible", d.compatible},
                                 {"incompatible", d.incompatible},
                                 {"boundary", d.boundary},
                                 {"failures", d.failures}});
        j["witness"] = report.witness;
        j["marginal_example"] = {{"branch_sum", mc.lhs[0]},
                                 {"dephased", mc.dephased[0]},
                                 {"direct", mc.direct[0]},
                                 {"max_branch_vs_dephased", mc.max_lhs_vs_dephased},
                                 {"max_branch_vs_direct", mc.max_lhs_vs_direct}};
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& d : report.per_dim)
            std::cout << "dim " << d.dim << ": " << d.compatible << " compatible, "
                      << d.incompatible << " incompatible, " << d.boundary << " boundary, "
                      << d.failures << " failures\n";
        if (!report.witness.empty()) std::cout << "witness: " << report.witness << "\n";
        std::cout << "two-basis example (angle pi/4, equal-weight state): branch sum "
                  << mc.lhs[0] << ", dephased " << mc.dephased[0] << ", direct "
                  << mc.direct[0] << "\n";
    }
    return report.total_failures == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact and simulated probabilities for card-deck observation systems"};
    app.require_subcommand(1);

    std::string deck_path, out_path, format, expr;
    SimulateArgs sim;
    std::string cls_arg, prep_arg, q_arg;
    std::vector<int> dims;
    long long trials = 200;
    std::uint64_t seed = 1;

    auto* c_validate = app.add_subcommand("validate", "check a deck file");
    c_validate->add_option("--deck", deck_path, "deck JSON file")->required();

    auto* c_tables = app.add_subcommand("tables", "emit the deck's probability tables");
    c_tables->add_option("--deck", deck_path, "deck JSON file")->required();
    c_tables->add_option("--format", format, "text|json|csv")
        ->default_val("text")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    c_tables->add_option("--out", out_path, "output file (default stdout)");

    auto* c_prob = app.add_subcommand("prob", "exact probability of a sequence");
    c_prob->add_option("--deck", deck_path, "deck JSON file")->required();
    c_prob->add_option("expression", expr, "e.g. \"Face=K; Suit=H & Face=K\"")->required();

    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo frequency table");
    c_sim->add_option("--deck", sim.deck_path, "deck JSON file")->required();
    c_sim->add_option("expression", sim.expr, "sequence to tally")->required();
    c_sim->add_option("--n", sim.n, "number of trials")->default_val(100000);
    c_sim->add_option("--seed", sim.seed, "seed for the deterministic variants")
        ->default_val(1);
    c_sim->add_option("--variant", sim.variant, "s|svi|svd")
        ->default_val("s")
        ->check(CLI::IsMember({"s", "svi", "svd"}));
    c_sim->add_option("--format", sim.format, "csv|json")
        ->default_val("csv")
        ->check(CLI::IsMember({"csv", "json"}));
    c_sim->add_option("--out", sim.out_path, "output file (default stdout)");
    c_sim->add_option("--threads", sim.threads, "worker threads (0 = all cores)")
        ->default_val(0);
    c_sim->add_option("--mode", sim.mode,
                      "shuffle = permute the whole sub-deck; draw = draw the top "
                      "card directly (equivalent distribution, faster)")
        ->default_val("shuffle")
        ->check(CLI::IsMember({"shuffle", "draw"}));
    c_sim->add_option("--device", sim.device, "entropy device for svi")
        ->default_val("/dev/urandom");
    c_sim->add_option("--prep-cap", sim.prep_cap, "preparation loop iteration cap")
        ->default_val(1000000);

    auto* c_int = app.add_subcommand("interfere", "merged-class interference");
    c_int->add_option("--deck", deck_path, "deck JSON file")->required();
    c_int->add_option("--class", cls_arg, "degenerate class, e.g. Color=R")->required();
    c_int->add_option("--prep", prep_arg, "preparation, e.g. Face=K")->required();
    c_int->add_option("--q", q_arg, "later event, e.g. Face=K")->required();

    auto* c_ex = app.add_subcommand("exercises", "two-card discard game worked answers");
    c_ex->add_option("--format", format, "md|json")
        ->default_val("md")
        ->check(CLI::IsMember({"md", "json"}));
    c_ex->add_option("--out", out_path, "output file (default stdout)");

    auto* c_q = app.add_subcommand("quantum", "projector-family compatibility checks");
    c_q->add_option("--dim", dims, "dimensions to fuzz (repeatable; default 2 3 4 5)");
    c_q->add_option("--trials", trials, "basis pairs per dimension")->default_val(200);
    c_q->add_option("--seed", seed, "fuzz seed")->default_val(1);
    c_q->add_option("--format", format, "text|json")
        ->default_val("text")
        ->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*c_validate) return cmd_validate(deck_path);
        if (*c_tables) return cmd_tables(deck_path, format, out_path);
        if (*c_prob) return cmd_prob(deck_path, expr);
        if (*c_sim) return cmd_simulate(sim);
        if (*c_int) return cmd_interfere(deck_path, cls_arg, prep_arg, q_arg);
        if (*c_ex) return cmd_exercises(format, out_path);
        if (*c_q) return cmd_quantum(dims, trials, seed, format);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const DeckError& e) {
        std::cerr << "deck error: " << e.what() << "\n";
        return 2;
    } catch (const UndefinedConditionalError& e) {
        std::cerr << "undefined: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
