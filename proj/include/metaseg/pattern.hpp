#pragma once

// Restricted regular expressions over the action alphabet.
//
// Supported syntax: letters from {m,r,l,u,d,i}, concatenation, alternation
// `|`, grouping `( )`, and the quantifiers `?`, `*`, `+`, `{n}`, `{m,n}`,
// `{m,}` and `{,n}` (read as `{0,n}`). Matching is always anchored at both
// ends of the subject string.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metaseg/error.hpp"

namespace metaseg {

class PatternSyntaxError : public Error {
 public:
  PatternSyntaxError(std::size_t offset, std::string reason);
  std::size_t offset() const noexcept { return offset_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t offset_;
  std::string reason_;
};

/// Largest count accepted inside `{...}`. Counted repetition is expanded
/// into NFA copies, so this bounds automaton size.
inline constexpr int kMaxRepeatCount = 1000;

struct PatternNode {
  enum class Kind { Literal, Concat, Alternate, Repeat };

  Kind kind = Kind::Literal;
  char literal = 0;                    // Literal
  std::vector<PatternNode> children;   // Concat / Alternate (>= 2), Repeat (exactly 1)
  int min = 0;                         // Repeat
  std::optional<int> max;              // Repeat; nullopt = unbounded

  friend bool operator==(const PatternNode&, const PatternNode&) = default;
};

/// Canonical textual form of an AST, e.g. "l m{0,3} r" prints as "lm{0,3}r".
std::string to_string(const PatternNode& node);

class Nfa;

/// A parsed, compiled pattern. Immutable and cheap to copy.
class Pattern {
 public:
  const std::string& source() const noexcept { return source_; }
  const PatternNode& ast() const noexcept { return *ast_; }
  const Nfa& nfa() const noexcept { return *nfa_; }

 private:
  friend Pattern parse_pattern(std::string_view source);
  Pattern() = default;

  std::string source_;
  std::shared_ptr<const PatternNode> ast_;
  std::shared_ptr<const Nfa> nfa_;
};

Pattern parse_pattern(std::string_view source);

/// True iff the whole of `s` is in the language of `p`.
bool full_match(const Pattern& p, std::string_view s);

/// Thompson NFA with epsilon closures folded into per-letter transition
/// sets. State sets are bitsets of `words()` 64-bit words.
class Nfa {
 public:
  using StateSet = std::vector<std::uint64_t>;

  explicit Nfa(const PatternNode& root);

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t words() const noexcept { return words_; }

  /// Closure of the start state.
  const StateSet& initial() const noexcept { return initial_; }

  /// Advances `from` by one letter into `to`. Returns false when `to` is empty.
  /// Letters outside the alphabet yield the empty set.
  bool step(const StateSet& from, char letter, StateSet& to) const;

  bool accepts(const StateSet& set) const noexcept;

  bool matches(std::string_view s) const;

 private:
  struct Builder;

  std::size_t num_states_ = 0;
  std::size_t words_ = 1;
  std::size_t accept_ = 0;
  StateSet initial_;
  // transitions_[letter_idx][state] = closure of successors, flattened.
  std::vector<std::vector<std::uint64_t>> transitions_;
  // states that have an outgoing transition on each letter, as a bitset.
  std::vector<StateSet> has_letter_;
};

}  // namespace metaseg
