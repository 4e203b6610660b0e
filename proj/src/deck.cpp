#include "decklab/deck.hpp"

#include "decklab/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace decklab {

namespace {

bool valid_name(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    }
    return true;
}

}  // namespace

std::shared_ptr<const Deck> Deck::create(std::vector<VariableSpec> variables,
                                         std::vector<DegenerateSpec> degenerates,
                                         std::vector<CardSpec> cards) {
    auto deck = std::shared_ptr<Deck>(new Deck());

    if (variables.empty()) throw DeckError("deck needs at least one variable");

    std::map<std::string, int> var_index;
    for (const auto& vs : variables) {
        if (!valid_name(vs.name))
            throw DeckError("variable name '" + vs.name + "' must be alphanumeric/underscore");
        if (var_index.count(vs.name))
            throw DeckError("duplicate variable name '" + vs.name + "'");
        if (vs.values.size() < 2)
            throw DeckError("variable '" + vs.name + "' needs at least two values");
        std::set<std::string> seen;
        for (const auto& v : vs.values) {
            if (!valid_name(v))
                throw DeckError("value '" + v + "' of variable '" + vs.name +
                                "' must be alphanumeric/underscore");
            if (!seen.insert(v).second)
                throw DeckError("variable '" + vs.name + "' repeats value '" + v + "'");
        }
        var_index[vs.name] = static_cast<int>(deck->variables_.size());
        deck->variables_.push_back({vs.name, vs.values});
    }

    for (const auto& ds : degenerates) {
        if (!valid_name(ds.name))
            throw DeckError("degenerate name '" + ds.name + "' must be alphanumeric/underscore");
        if (var_index.count(ds.name))
            throw DeckError("degenerate '" + ds.name + "' clashes with a variable name");
        for (const auto& d : deck->degenerates_)
            if (d.name == ds.name)
                throw DeckError("duplicate degenerate name '" + ds.name + "'");
        auto it = var_index.find(ds.over);
        if (it == var_index.end())
            throw DeckError("degenerate '" + ds.name + "' is over unknown variable '" +
                            ds.over + "'");
        const Variable& base = deck->variables_[static_cast<size_t>(it->second)];
        if (ds.classes.size() < 2)
            throw DeckError("degenerate '" + ds.name + "' needs at least two classes");

        Degenerate deg;
        deg.name = ds.name;
        deg.over = it->second;
        deg.class_of_value.assign(base.values.size(), -1);
        std::set<std::string> class_seen;
        for (const auto& [cname, members] : ds.classes) {
            if (!valid_name(cname))
                throw DeckError("class '" + cname + "' of '" + ds.name +
                                "' must be alphanumeric/underscore");
            if (!class_seen.insert(cname).second)
                throw DeckError("degenerate '" + ds.name + "' repeats class '" + cname + "'");
            if (members.empty())
                throw DeckError("class '" + cname + "' of '" + ds.name + "' is empty");
            std::vector<int> idx;
            for (const auto& m : members) {
                auto mit = std::find(base.values.begin(), base.values.end(), m);
                if (mit == base.values.end())
                    throw DeckError("class '" + cname + "' of '" + ds.name +
                                    "' names unknown value '" + m + "'");
                int vi = static_cast<int>(mit - base.values.begin());
                if (deg.class_of_value[static_cast<size_t>(vi)] != -1)
                    throw DeckError("degenerate '" + ds.name + "' assigns value '" + m +
                                    "' to more than one class");
                deg.class_of_value[static_cast<size_t>(vi)] =
                    static_cast<int>(deg.class_names.size());
                idx.push_back(vi);
            }
            std::sort(idx.begin(), idx.end());
            deg.class_names.push_back(cname);
            deg.members.push_back(std::move(idx));
        }
        for (size_t v = 0; v < base.values.size(); ++v)
            if (deg.class_of_value[v] == -1)
                throw DeckError("degenerate '" + ds.name + "' leaves value '" +
                                base.values[v] + "' unassigned");
        deck->degenerates_.push_back(std::move(deg));
    }

    // Resolve cards, then sort into canonical order.
    std::vector<std::pair<std::vector<int>, long long>> resolved;
    for (const auto& cs : cards) {
        if (cs.count < 0)
            throw DeckError("negative card count");
        std::vector<int> assign(deck->variables_.size(), -1);
        for (const auto& [vname, val] : cs.values) {
            auto it = var_index.find(vname);
            if (it == var_index.end())
                throw DeckError("card names unknown variable '" + vname + "'");
            const Variable& var = deck->variables_[static_cast<size_t>(it->second)];
            auto vit = std::find(var.values.begin(), var.values.end(), val);
            if (vit == var.values.end())
                throw DeckError("card assigns unknown value '" + val + "' to variable '" +
                                vname + "'");
            assign[static_cast<size_t>(it->second)] =
                static_cast<int>(vit - var.values.begin());
        }
        for (size_t v = 0; v < assign.size(); ++v)
            if (assign[v] == -1)
                throw DeckError("card is missing a value for variable '" +
                                deck->variables_[v].name + "'");
        resolved.emplace_back(std::move(assign), cs.count);
    }
    std::sort(resolved.begin(), resolved.end());
    for (size_t i = 1; i < resolved.size(); ++i)
        if (resolved[i].first == resolved[i - 1].first)
            throw DeckError("duplicate card entry for one assignment");

    long long total = 0;
    for (auto& [assign, count] : resolved) {
        deck->cards_.push_back(std::move(assign));
        deck->counts_.push_back(count);
        total += count;
    }
    deck->total_ = total;
    if (total > std::numeric_limits<std::uint16_t>::max())
        throw DeckError("deck holds more than 65535 physical cards");

    deck->marginals_.resize(deck->variables_.size());
    for (size_t v = 0; v < deck->variables_.size(); ++v)
        deck->marginals_[v].assign(deck->variables_[v].values.size(), 0);
    for (size_t c = 0; c < deck->cards_.size(); ++c)
        for (size_t v = 0; v < deck->variables_.size(); ++v)
            deck->marginals_[v][static_cast<size_t>(deck->cards_[c][v])] += deck->counts_[c];

    deck->deg_marginals_.resize(deck->degenerates_.size());
    for (size_t d = 0; d < deck->degenerates_.size(); ++d) {
        const Degenerate& deg = deck->degenerates_[d];
        deck->deg_marginals_[d].assign(deg.class_names.size(), 0);
        for (size_t k = 0; k < deg.class_names.size(); ++k)
            for (int v : deg.members[k])
                deck->deg_marginals_[d][k] +=
                    deck->marginals_[static_cast<size_t>(deg.over)][static_cast<size_t>(v)];
    }

    deck->expansion_.reserve(static_cast<size_t>(total));
    for (size_t c = 0; c < deck->cards_.size(); ++c)
        for (long long i = 0; i < deck->counts_[c]; ++i)
            deck->expansion_.push_back(static_cast<std::uint16_t>(c));

    return deck;
}

std::optional<Target> Deck::find_target(std::string_view name) const {
    for (size_t v = 0; v < variables_.size(); ++v)
        if (variables_[v].name == name)
            return Target{Target::Kind::variable, static_cast<int>(v)};
    for (size_t d = 0; d < degenerates_.size(); ++d)
        if (degenerates_[d].name == name)
            return Target{Target::Kind::degenerate, static_cast<int>(d)};
    return std::nullopt;
}

int Deck::find_outcome(const Target& t, std::string_view name) const {
    if (t.kind == Target::Kind::variable) {
        const auto& vals = variables_[static_cast<size_t>(t.index)].values;
        for (size_t i = 0; i < vals.size(); ++i)
            if (vals[i] == name) return static_cast<int>(i);
    } else {
        const auto& names = degenerates_[static_cast<size_t>(t.index)].class_names;
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i);
    }
    return -1;
}

int Deck::outcome_count(const Target& t) const {
    if (t.kind == Target::Kind::variable)
        return static_cast<int>(variables_[static_cast<size_t>(t.index)].values.size());
    return static_cast<int>(degenerates_[static_cast<size_t>(t.index)].class_names.size());
}

const std::string& Deck::target_name(const Target& t) const {
    if (t.kind == Target::Kind::variable)
        return variables_[static_cast<size_t>(t.index)].name;
    return degenerates_[static_cast<size_t>(t.index)].name;
}

const std::string& Deck::outcome_name(const Target& t, int outcome) const {
    if (t.kind == Target::Kind::variable)
        return variables_[static_cast<size_t>(t.index)].values[static_cast<size_t>(outcome)];
    return degenerates_[static_cast<size_t>(t.index)].class_names[static_cast<size_t>(outcome)];
}

int Deck::underlying_variable(const Target& t) const {
    if (t.kind == Target::Kind::variable) return t.index;
    return degenerates_[static_cast<size_t>(t.index)].over;
}

int Deck::outcome_of_card(const Target& t, std::size_t c) const {
    int value = cards_[c][static_cast<size_t>(underlying_variable(t))];
    if (t.kind == Target::Kind::variable) return value;
    return degenerates_[static_cast<size_t>(t.index)].class_of_value[static_cast<size_t>(value)];
}

long long Deck::marginal_count(const Target& t, int o) const {
    if (t.kind == Target::Kind::variable)
        return marginals_[static_cast<size_t>(t.index)][static_cast<size_t>(o)];
    return deg_marginals_[static_cast<size_t>(t.index)][static_cast<size_t>(o)];
}

Rational Deck::normalized_count(std::size_t c) const {
    if (total_ == 0) throw DeckError("normalized_count on an empty deck");
    return Rational(BigInt(counts_[c]), BigInt(total_));
}

Rational Deck::marginal_fraction(const Target& t, int o) const {
    if (total_ == 0) throw DeckError("marginal_fraction on an empty deck");
    return Rational(BigInt(marginal_count(t, o)), BigInt(total_));
}

std::optional<std::size_t> Deck::find_card(const std::vector<int>& assignment) const {
    auto it = std::lower_bound(cards_.begin(), cards_.end(), assignment);
    if (it == cards_.end() || *it != assignment) return std::nullopt;
    return static_cast<std::size_t>(it - cards_.begin());
}

Deck::ValidationReport Deck::validate() const {
    ValidationReport rep;
    if (total_ == 0) {
        rep.problems.push_back("deck holds no cards");
        return rep;
    }
    rep.valid = true;
    for (size_t v = 0; v < variables_.size(); ++v) {
        const long long expect = marginals_[v][0];
        for (size_t i = 1; i < variables_[v].values.size(); ++i) {
            if (marginals_[v][i] == expect) continue;
            rep.valid = false;
            rep.problems.push_back(
                "variable '" + variables_[v].name + "': value '" +
                variables_[v].values[i] + "' is held by " +
                std::to_string(marginals_[v][i]) + " cards but value '" +
                variables_[v].values[0] + "' by " + std::to_string(expect));
        }
        if (expect == 0) {
            rep.valid = false;
            rep.problems.push_back("variable '" + variables_[v].name + "': value '" +
                                   variables_[v].values[0] + "' is held by no card");
        }
    }
    if (rep.valid) {
        rep.values_per_variable.resize(variables_.size());
        for (size_t v = 0; v < variables_.size(); ++v)
            rep.values_per_variable[v] =
                static_cast<long long>(variables_[v].values.size());
    }
    return rep;
}

bool operator==(const Deck& a, const Deck& b) {
    auto var_eq = [](const Deck::Variable& x, const Deck::Variable& y) {
        return x.name == y.name && x.values == y.values;
    };
    if (a.variables_.size() != b.variables_.size()) return false;
    for (size_t i = 0; i < a.variables_.size(); ++i)
        if (!var_eq(a.variables_[i], b.variables_[i])) return false;
    auto deg_eq = [](const Deck::Degenerate& x, const Deck::Degenerate& y) {
        return x.name == y.name && x.over == y.over && x.class_names == y.class_names &&
               x.members == y.members;
    };
    if (a.degenerates_.size() != b.degenerates_.size()) return false;
    for (size_t i = 0; i < a.degenerates_.size(); ++i)
        if (!deg_eq(a.degenerates_[i], b.degenerates_[i])) return false;
    return a.cards_ == b.cards_ && a.counts_ == b.counts_;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

using nlohmann::ordered_json;

std::string require_string(const ordered_json& j, const char* where) {
    if (!j.is_string()) throw DeckError(std::string(where) + " must be a string");
    return j.get<std::string>();
}

}  // namespace

DeckPtr deck_from_json(const std::string& text) {
    // Parse order-preserving: degenerate class indices follow the file.
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DeckError(std::string("deck file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw DeckError("deck file must be a JSON object");
    if (!j.contains("variables") || !j["variables"].is_array())
        throw DeckError("deck file needs a 'variables' array");
    if (!j.contains("cards") || !j["cards"].is_array())
        throw DeckError("deck file needs a 'cards' array");

    std::vector<VariableSpec> vars;
    for (const auto& v : j["variables"]) {
        if (!v.is_object() || !v.contains("name") || !v.contains("values") ||
            !v["values"].is_array())
            throw DeckError("each variable needs 'name' and a 'values' array");
        VariableSpec vs;
        vs.name = require_string(v["name"], "variable name");
        for (const auto& val : v["values"])
            vs.values.push_back(require_string(val, "variable value"));
        vars.push_back(std::move(vs));
    }

    std::vector<DegenerateSpec> degs;
    if (j.contains("degenerate")) {
        if (!j["degenerate"].is_array())
            throw DeckError("'degenerate' must be an array");
        for (const auto& d : j["degenerate"]) {
            if (!d.is_object() || !d.contains("name") || !d.contains("over") ||
                !d.contains("classes") || !d["classes"].is_object())
                throw DeckError("each degenerate needs 'name', 'over' and a 'classes' object");
            DegenerateSpec ds;
            ds.name = require_string(d["name"], "degenerate name");
            ds.over = require_string(d["over"], "degenerate 'over'");
            for (const auto& [cname, members] : d["classes"].items()) {
                if (!members.is_array())
                    throw DeckError("class '" + cname + "' must be an array of values");
                std::vector<std::string> ms;
                for (const auto& m : members)
                    ms.push_back(require_string(m, "class member"));
                ds.classes.emplace_back(cname, std::move(ms));
            }
            degs.push_back(std::move(ds));
        }
    }

    std::vector<CardSpec> cards;
    for (const auto& c : j["cards"]) {
        if (!c.is_object() || !c.contains("values") || !c["values"].is_object())
            throw DeckError("each card needs a 'values' object");
        CardSpec cs;
        for (const auto& [k, v] : c["values"].items())
            cs.values[k] = require_string(v, "card value");
        if (c.contains("count")) {
            if (!c["count"].is_number_integer())
                throw DeckError("card 'count' must be an integer");
            cs.count = c["count"].get<long long>();
        }
        cards.push_back(std::move(cs));
    }

    return Deck::create(std::move(vars), std::move(degs), std::move(cards));
}

DeckPtr deck_from_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DeckError("cannot open deck file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return deck_from_json(ss.str());
    } catch (const DeckError& e) {
        throw DeckError(path + ": " + e.what());
    }
}

std::string deck_to_json(const Deck& deck) {
    ordered_json j;
    j["variables"] = ordered_json::array();
    for (int v = 0; v < deck.variable_count(); ++v) {
        const auto& var = deck.variable(v);
        j["variables"].push_back({{"name", var.name}, {"values", var.values}});
    }
    if (deck.degenerate_count() > 0) {
        j["degenerate"] = ordered_json::array();
        for (int d = 0; d < deck.degenerate_count(); ++d) {
            const auto& deg = deck.degenerate(d);
            ordered_json classes = ordered_json::object();
            for (size_t k = 0; k < deg.class_names.size(); ++k) {
                ordered_json members = ordered_json::array();
                for (int m : deg.members[k])
                    members.push_back(deck.variable(deg.over).values[static_cast<size_t>(m)]);
                classes[deg.class_names[k]] = members;
            }
            j["degenerate"].push_back(
                {{"name", deg.name}, {"over", deck.variable(deg.over).name}, {"classes", classes}});
        }
    }
    j["cards"] = ordered_json::array();
    for (size_t c = 0; c < deck.card_type_count(); ++c) {
        ordered_json values = ordered_json::object();
        for (int v = 0; v < deck.variable_count(); ++v)
            values[deck.variable(v).name] =
                deck.variable(v).values[static_cast<size_t>(deck.card(c)[static_cast<size_t>(v)])];
        j["cards"].push_back({{"values", values}, {"count", deck.count(c)}});
    }
    return j.dump(2) + "\n";
}

}  // namespace decklab
