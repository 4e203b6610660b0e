#include "decklab/parser.hpp"

#include "decklab/errors.hpp"

#include <cctype>

namespace decklab {

namespace {

class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }

    std::size_t pos() const { return pos_; }

    /// Next char if it equals `c` (consuming it), else false.
    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c)
            throw ParseError(pos_, std::string("expected ") + what);
        ++pos_;
    }

    /// Alphanumeric/underscore run. Throws if none starts here.
    std::string_view name(const char* what) {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
                ++pos_;
            else
                break;
        }
        if (pos_ == start)
            throw ParseError(start, std::string("expected ") + what);
        return text_.substr(start, pos_ - start);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

Target resolve_target(const Deck& deck, std::string_view name, std::size_t at) {
    auto t = deck.find_target(name);
    if (!t)
        throw ParseError(at, "unknown variable '" + std::string(name) + "'");
    return *t;
}

int resolve_outcome(const Deck& deck, const Target& t, std::string_view name, std::size_t at) {
    int o = deck.find_outcome(t, name);
    if (o < 0)
        throw ParseError(at, "'" + std::string(name) + "' is not a value of '" +
                                 deck.target_name(t) + "'");
    return o;
}

EventStep parse_step(const Deck& deck, Cursor& cur) {
    cur.skip_ws();
    const std::size_t var_at = cur.pos();
    const Target target = resolve_target(deck, cur.name("a variable name"), var_at);
    cur.expect('=', "'='");

    EventStep step;
    step.target = target;
    if (cur.accept('*')) {
        step.match = EventStep::Match::ignored;
        return step;
    }
    cur.skip_ws();
    const std::size_t open_at = cur.pos();
    if (cur.accept('(')) {
        step.match = EventStep::Match::any_of;
        do {
            cur.skip_ws();
            const std::size_t val_at = cur.pos();
            int o = resolve_outcome(deck, target, cur.name("a value name"), val_at);
            for (int prev : step.outcomes)
                if (prev == o)
                    throw ParseError(val_at, "value repeated in outcome set");
            step.outcomes.push_back(o);
        } while (cur.accept('|'));
        cur.expect(')', "')' or '|'");
        if (step.outcomes.size() < 2)
            throw ParseError(open_at, "outcome set needs at least two values");
        return step;
    }
    cur.skip_ws();
    const std::size_t val_at = cur.pos();
    step.match = EventStep::Match::single;
    step.outcomes.push_back(resolve_outcome(deck, target, cur.name("a value name"), val_at));
    return step;
}

}  // namespace

EventSequence parse_sequence(const DeckPtr& deck, std::string_view text) {
    Cursor cur(text);
    EventSequence seq;
    seq.deck = deck;

    cur.skip_ws();
    const std::size_t prep_var_at = cur.pos();
    seq.prep_target = resolve_target(*deck, cur.name("a variable name"), prep_var_at);
    cur.expect('=', "'='");
    cur.skip_ws();
    const std::size_t prep_val_at = cur.pos();
    seq.prep_outcome =
        resolve_outcome(*deck, seq.prep_target, cur.name("a value name"), prep_val_at);
    cur.expect(';', "';' after the preparation");

    seq.steps.push_back(parse_step(*deck, cur));
    while (cur.accept('&'))
        seq.steps.push_back(parse_step(*deck, cur));

    if (!cur.at_end())
        throw ParseError(cur.pos(), "unexpected trailing input");
    return seq;
}

}  // namespace decklab
