#ifndef DECKLAB_PARSER_HPP
#define DECKLAB_PARSER_HPP

#include "decklab/deck.hpp"
#include "decklab/engine.hpp"

#include <string_view>

namespace decklab {

/// Parse a sequence expression against a deck:
///
///   SEQ  := PREP ';' STEP ('&' STEP)*
///   PREP := NAME '=' NAME
///   STEP := NAME '=' NAME
///         | NAME '=' '(' NAME ('|' NAME)+ ')'
///         | NAME '=' '*'
///
/// Names are alphanumeric/underscore; whitespace is free between tokens.
/// The left side of '=' must resolve to a variable or degenerate variable
/// of the deck and the right side to one of its outcomes. Violations of
/// the grammar or unresolvable names throw ParseError carrying the byte
/// offset of the offending token.
EventSequence parse_sequence(const DeckPtr& deck, std::string_view text);

}  // namespace decklab

#endif
