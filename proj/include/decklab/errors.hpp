#ifndef DECKLAB_ERRORS_HPP
#define DECKLAB_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace decklab {

/// Structural problems in a deck definition or a deck file.
class DeckError : public std::runtime_error {
public:
    explicit DeckError(const std::string& what) : std::runtime_error(what) {}
};

/// Sequence-expression syntax or resolution failure. Carries the byte
/// offset of the offending token within the original input.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, const std::string& what)
        : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Conditioning on an event of probability zero.
class UndefinedConditionalError : public std::runtime_error {
public:
    explicit UndefinedConditionalError(const std::string& what)
        : std::runtime_error(what) {}
};

/// Misuse of the engine API (empty sequences, mismatched decks, ...).
class EngineError : public std::runtime_error {
public:
    explicit EngineError(const std::string& what) : std::runtime_error(what) {}
};

/// Interference asked for an outcome set that is not a merged class, or
/// the coarse/fine additivity premise failed on the given deck.
class InterferenceError : public std::runtime_error {
public:
    explicit InterferenceError(const std::string& what)
        : std::runtime_error(what) {}
};

/// The OS entropy source could not be opened or read.
class EntropyError : public std::runtime_error {
public:
    explicit EntropyError(const std::string& what) : std::runtime_error(what) {}
};

/// A preparation loop exceeded its iteration cap.
class IterationCapError : public std::runtime_error {
public:
    explicit IterationCapError(const std::string& what)
        : std::runtime_error(what) {}
};

/// Invalid operator families, non-unit states, dimension mismatches.
class QuantumError : public std::runtime_error {
public:
    explicit QuantumError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace decklab

#endif
