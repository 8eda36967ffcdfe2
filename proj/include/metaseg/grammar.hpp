#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metaseg/error.hpp"
#include "metaseg/pattern.hpp"

namespace metaseg {

struct MetaAction {
  int id = 0;
  std::string name;
  Pattern pattern;
};

class GrammarError : public Error {
 public:
  using Error::Error;
};

class DuplicateName : public GrammarError {
 public:
  DuplicateName(std::string name, std::size_t line);
  const std::string& name() const noexcept { return name_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string name_;
  std::size_t line_;
};

class EmptyGrammar : public GrammarError {
 public:
  EmptyGrammar() : GrammarError("grammar has no meta-actions") {}
};

/// A pattern error inside a grammar file, tagged with its 1-based line.
class GrammarSyntaxError : public GrammarError {
 public:
  GrammarSyntaxError(std::size_t line, std::string reason, std::optional<std::size_t> offset);
  std::size_t line() const noexcept { return line_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  std::size_t line_;
  std::optional<std::size_t> offset_;
};

/// Ordered set of named patterns. Order is the tie-break priority used by
/// the segmenter: lower ids win among equally short segmentations.
class MetaActionGrammar {
 public:
  /// Throws EmptyGrammar / DuplicateName.
  explicit MetaActionGrammar(std::vector<MetaAction> metas);

  const std::vector<MetaAction>& metas() const noexcept { return metas_; }
  std::size_t size() const noexcept { return metas_.size(); }
  const MetaAction& operator[](std::size_t i) const { return metas_.at(i); }
  std::optional<int> find(std::string_view name) const;

 private:
  std::vector<MetaAction> metas_;
};

/// The built-in ten meta-actions.
const MetaActionGrammar& default_grammar();

/// Parses `NAME<TAB>PATTERN` lines. `#` comments and blank lines are skipped.
MetaActionGrammar load_grammar(std::string_view text);
MetaActionGrammar load_grammar_file(const std::string& path);

/// Serializes back into the grammar file format.
std::string to_grammar_text(const MetaActionGrammar& g);

/// True iff every single letter of the alphabet is matched by some pattern.
bool complete(const MetaActionGrammar& g);

}  // namespace metaseg
