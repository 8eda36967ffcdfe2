#include "metaseg/grammar.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "metaseg/trajectory.hpp"

namespace metaseg {

DuplicateName::DuplicateName(std::string name, std::size_t line)
    : GrammarError("duplicate meta-action name '" + name + "'" +
                   (line ? " on line " + std::to_string(line) : std::string())),
      name_(std::move(name)),
      line_(line) {}

GrammarSyntaxError::GrammarSyntaxError(std::size_t line, std::string reason,
                                       std::optional<std::size_t> offset)
    : GrammarError("grammar line " + std::to_string(line) + ": " + reason),
      line_(line),
      offset_(offset) {}

MetaActionGrammar::MetaActionGrammar(std::vector<MetaAction> metas) : metas_(std::move(metas)) {
  if (metas_.empty()) throw EmptyGrammar();
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < metas_.size(); ++i) {
    metas_[i].id = static_cast<int>(i);
    if (!seen.insert(metas_[i].name).second) throw DuplicateName(metas_[i].name, 0);
  }
}

std::optional<int> MetaActionGrammar::find(std::string_view name) const {
  for (const auto& m : metas_) {
    if (m.name == name) return m.id;
  }
  return std::nullopt;
}

const MetaActionGrammar& default_grammar() {
  static const MetaActionGrammar grammar = [] {
    const std::pair<const char*, const char*> rows[] = {
        {"Step Right", "rm{,3}l"},
        {"Step Left", "lm{,3}r"},
        {"Move Forward", "m{1,}"},
        {"Step Back", "(ll|rr)m+(ll|rr)"},
        {"Turn Left", "l{1}"},
        {"Turn Right", "r{1}"},
        {"Turn Around", "(lm?l)|(rm?r)"},
        {"Look Up", "u{1,}"},
        {"Look Down", "d{1,}"},
        {"Interaction", "i"},
    };
    std::vector<MetaAction> metas;
    for (const auto& [name, src] : rows) {
      metas.push_back({0, name, parse_pattern(src)});
    }
    return MetaActionGrammar(std::move(metas));
  }();
  return grammar;
}

namespace {

std::string_view rstrip(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' ||
                        s.back() == '\n' || s.back() == '\v' || s.back() == '\f')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

MetaActionGrammar load_grammar(std::string_view text) {
  std::vector<MetaAction> metas;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    line = rstrip(line);
    if (line.empty() || line.front() == '#') continue;

    auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw GrammarSyntaxError(line_no, "expected NAME<TAB>PATTERN", std::nullopt);
    }
    std::string name(line.substr(0, tab));
    std::string_view source = line.substr(tab + 1);
    if (name.empty()) throw GrammarSyntaxError(line_no, "empty meta-action name", std::nullopt);
    if (source.find('\t') != std::string_view::npos) {
      throw GrammarSyntaxError(line_no, "more than one tab on line", std::nullopt);
    }
    if (!seen.insert(name).second) throw DuplicateName(name, line_no);

    try {
      metas.push_back({static_cast<int>(metas.size()), std::move(name), parse_pattern(source)});
    } catch (const PatternSyntaxError& e) {
      throw GrammarSyntaxError(line_no, e.what(), e.offset());
    }
  }
  return MetaActionGrammar(std::move(metas));
}

MetaActionGrammar load_grammar_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GrammarError("cannot open grammar file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_grammar(buf.str());
}

std::string to_grammar_text(const MetaActionGrammar& g) {
  std::string out;
  for (const auto& m : g.metas()) {
    out += m.name;
    out += '\t';
    out += m.pattern.source();
    out += '\n';
  }
  return out;
}

bool complete(const MetaActionGrammar& g) {
  return std::all_of(kAlphabet.begin(), kAlphabet.end(), [&](char c) {
    const std::string_view one(&c, 1);
    return std::any_of(g.metas().begin(), g.metas().end(),
                       [&](const MetaAction& m) { return full_match(m.pattern, one); });
  });
}

}  // namespace metaseg
