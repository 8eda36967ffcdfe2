#include "metaseg/pattern.hpp"

#include <bit>
#include <charconv>

#include "metaseg/trajectory.hpp"

namespace metaseg {

PatternSyntaxError::PatternSyntaxError(std::size_t offset, std::string reason)
    : Error("pattern syntax error at offset " + std::to_string(offset) + ": " + reason),
      offset_(offset),
      reason_(std::move(reason)) {}

namespace {

constexpr std::size_t kMaxNfaStates = 4096;

bool is_quantifier_start(char c) { return c == '?' || c == '*' || c == '+' || c == '{'; }

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  PatternNode parse() {
    if (src_.empty()) throw PatternSyntaxError(0, "empty pattern");
    PatternNode root = parse_alternation();
    if (pos_ != src_.size()) {
      if (src_[pos_] == ')') throw PatternSyntaxError(pos_, "unbalanced ')'");
      throw PatternSyntaxError(pos_, "unexpected character");
    }
    return root;
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }

  PatternNode parse_alternation() {
    std::vector<PatternNode> branches;
    branches.push_back(parse_concat());
    while (!at_end() && peek() == '|') {
      ++pos_;
      branches.push_back(parse_concat());
    }
    if (branches.size() == 1) return std::move(branches.front());
    PatternNode node;
    node.kind = PatternNode::Kind::Alternate;
    node.children = std::move(branches);
    return node;
  }

  PatternNode parse_concat() {
    std::vector<PatternNode> items;
    while (!at_end() && peek() != '|' && peek() != ')') {
      items.push_back(parse_repeat());
    }
    if (items.empty()) throw PatternSyntaxError(pos_, "empty alternative");
    if (items.size() == 1) return std::move(items.front());
    PatternNode node;
    node.kind = PatternNode::Kind::Concat;
    node.children = std::move(items);
    return node;
  }

  PatternNode parse_repeat() {
    PatternNode atom = parse_atom();
    if (at_end() || !is_quantifier_start(peek())) return atom;

    int lo = 0;
    std::optional<int> hi;
    switch (peek()) {
      case '?': lo = 0; hi = 1; ++pos_; break;
      case '*': lo = 0; ++pos_; break;
      case '+': lo = 1; ++pos_; break;
      default: parse_braces(lo, hi); break;
    }
    if (!at_end() && is_quantifier_start(peek())) {
      throw PatternSyntaxError(pos_, "quantifier follows quantifier");
    }
    PatternNode node;
    node.kind = PatternNode::Kind::Repeat;
    node.min = lo;
    node.max = hi;
    node.children.push_back(std::move(atom));
    return node;
  }

  std::optional<int> parse_count() {
    const std::size_t start = pos_;
    while (!at_end() && peek() >= '0' && peek() <= '9') ++pos_;
    if (pos_ == start) return std::nullopt;
    int value = 0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc() || value > kMaxRepeatCount) {
      throw PatternSyntaxError(start, "repeat count exceeds " + std::to_string(kMaxRepeatCount));
    }
    return value;
  }

  void parse_braces(int& lo, std::optional<int>& hi) {
    const std::size_t open = pos_;
    ++pos_;  // '{'
    auto first = parse_count();
    if (at_end()) throw PatternSyntaxError(open, "unterminated '{'");
    if (peek() == '}') {
      if (!first) throw PatternSyntaxError(pos_, "missing repeat count");
      ++pos_;
      lo = *first;
      hi = *first;
      return;
    }
    if (peek() != ',') throw PatternSyntaxError(pos_, "expected ',' or '}' in repeat");
    ++pos_;
    auto second = parse_count();
    if (at_end() || peek() != '}') throw PatternSyntaxError(at_end() ? open : pos_, "unterminated '{'");
    ++pos_;
    if (!first && !second) throw PatternSyntaxError(open, "repeat needs at least one bound");
    lo = first.value_or(0);
    hi = second;
    if (hi && *hi < lo) throw PatternSyntaxError(open, "repeat upper bound below lower bound");
  }

  PatternNode parse_atom() {
    const char c = peek();
    if (c == '(') {
      const std::size_t open = pos_;
      ++pos_;
      if (!at_end() && peek() == ')') throw PatternSyntaxError(pos_, "empty group");
      PatternNode inner = parse_alternation();
      if (at_end() || peek() != ')') throw PatternSyntaxError(open, "unbalanced '('");
      ++pos_;
      return inner;
    }
    if (is_quantifier_start(c)) throw PatternSyntaxError(pos_, "quantifier without operand");
    if (!is_action_letter(c)) {
      throw PatternSyntaxError(pos_, std::string("unsupported character '") + c + "'");
    }
    ++pos_;
    PatternNode node;
    node.kind = PatternNode::Kind::Literal;
    node.literal = c;
    return node;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(const PatternNode& node) {
  using Kind = PatternNode::Kind;
  switch (node.kind) {
    case Kind::Literal: return std::string(1, node.literal);
    case Kind::Concat: {
      std::string out;
      for (const auto& c : node.children) {
        out += c.kind == Kind::Alternate ? "(" + to_string(c) + ")" : to_string(c);
      }
      return out;
    }
    case Kind::Alternate: {
      std::string out;
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i) out += '|';
        out += to_string(node.children[i]);
      }
      return out;
    }
    case Kind::Repeat: {
      const auto& c = node.children.front();
      std::string out = c.kind == Kind::Literal ? to_string(c) : "(" + to_string(c) + ")";
      out += '{' + std::to_string(node.min);
      if (!node.max) {
        out += ",}";
      } else if (*node.max != node.min) {
        out += ',' + std::to_string(*node.max) + '}';
      } else {
        out += '}';
      }
      return out;
    }
  }
  return {};
}

// Thompson construction. Each fragment has a single entry and a single exit
// state; the exit never has outgoing letter transitions.
struct Nfa::Builder {
  struct State {
    char letter = 0;  // 0 for epsilon-only states
    std::size_t next = 0;
    std::vector<std::size_t> eps;
  };
  struct Fragment {
    std::size_t entry;
    std::size_t exit;
  };

  std::vector<State> states;

  std::size_t add() {
    if (states.size() >= kMaxNfaStates) throw PatternSyntaxError(0, "pattern too large");
    states.emplace_back();
    return states.size() - 1;
  }

  Fragment build(const PatternNode& node) {
    using Kind = PatternNode::Kind;
    switch (node.kind) {
      case Kind::Literal: {
        auto s = add();
        auto e = add();
        states[s].letter = node.literal;
        states[s].next = e;
        return {s, e};
      }
      case Kind::Concat: {
        Fragment first = build(node.children.front());
        std::size_t exit = first.exit;
        for (std::size_t i = 1; i < node.children.size(); ++i) {
          Fragment f = build(node.children[i]);
          states[exit].eps.push_back(f.entry);
          exit = f.exit;
        }
        return {first.entry, exit};
      }
      case Kind::Alternate: {
        auto s = add();
        auto e = add();
        for (const auto& child : node.children) {
          Fragment f = build(child);
          states[s].eps.push_back(f.entry);
          states[f.exit].eps.push_back(e);
        }
        return {s, e};
      }
      case Kind::Repeat: {
        const auto& child = node.children.front();
        auto s = add();
        std::size_t exit = s;
        for (int i = 0; i < node.min; ++i) {
          Fragment f = build(child);
          states[exit].eps.push_back(f.entry);
          exit = f.exit;
        }
        auto e = add();
        if (!node.max) {
          Fragment f = build(child);
          states[exit].eps.push_back(f.entry);
          states[exit].eps.push_back(e);
          states[f.exit].eps.push_back(f.entry);
          states[f.exit].eps.push_back(e);
        } else {
          // Each optional copy may bail out straight to the end.
          for (int i = node.min; i < *node.max; ++i) {
            Fragment f = build(child);
            states[exit].eps.push_back(f.entry);
            states[exit].eps.push_back(e);
            exit = f.exit;
          }
          states[exit].eps.push_back(e);
        }
        return {s, e};
      }
    }
    return {0, 0};
  }
};

namespace {

void set_bit(Nfa::StateSet& set, std::size_t i) { set[i / 64] |= std::uint64_t{1} << (i % 64); }
bool test_bit(const Nfa::StateSet& set, std::size_t i) {
  return (set[i / 64] >> (i % 64)) & 1u;
}

}  // namespace

Nfa::Nfa(const PatternNode& root) {
  Builder b;
  Builder::Fragment frag = b.build(root);
  num_states_ = b.states.size();
  words_ = (num_states_ + 63) / 64;
  accept_ = frag.exit;

  // Epsilon closures by iterative DFS.
  std::vector<StateSet> closure(num_states_, StateSet(words_, 0));
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < num_states_; ++s) {
    StateSet& c = closure[s];
    stack.assign(1, s);
    set_bit(c, s);
    while (!stack.empty()) {
      auto cur = stack.back();
      stack.pop_back();
      for (auto t : b.states[cur].eps) {
        if (!test_bit(c, t)) {
          set_bit(c, t);
          stack.push_back(t);
        }
      }
    }
  }

  initial_ = closure[frag.entry];
  transitions_.assign(kAlphabet.size(), std::vector<std::uint64_t>(num_states_ * words_, 0));
  has_letter_.assign(kAlphabet.size(), StateSet(words_, 0));
  for (std::size_t s = 0; s < num_states_; ++s) {
    const auto& st = b.states[s];
    if (st.letter == 0) continue;
    const auto li = letter_index(st.letter);
    set_bit(has_letter_[li], s);
    std::copy(closure[st.next].begin(), closure[st.next].end(),
              transitions_[li].begin() + static_cast<std::ptrdiff_t>(s * words_));
  }
}

bool Nfa::step(const StateSet& from, char letter, StateSet& to) const {
  to.assign(words_, 0);
  const auto li = kAlphabet.find(letter);
  if (li == std::string_view::npos) return false;
  const auto& mask = has_letter_[li];
  const auto& table = transitions_[li];
  bool any = false;
  for (std::size_t w = 0; w < words_; ++w) {
    std::uint64_t live = from[w] & mask[w];
    while (live) {
      const auto bit = static_cast<std::size_t>(std::countr_zero(live));
      live &= live - 1;
      const std::size_t s = w * 64 + bit;
      const std::uint64_t* row = table.data() + s * words_;
      for (std::size_t k = 0; k < words_; ++k) to[k] |= row[k];
      any = true;
    }
  }
  return any;
}

bool Nfa::accepts(const StateSet& set) const noexcept { return test_bit(set, accept_); }

bool Nfa::matches(std::string_view s) const {
  if (words_ == 1) {
    std::uint64_t cur = initial_[0];
    for (char c : s) {
      const auto li = kAlphabet.find(c);
      if (li == std::string_view::npos) return false;
      std::uint64_t live = cur & has_letter_[li][0];
      std::uint64_t next = 0;
      while (live) {
        next |= transitions_[li][static_cast<std::size_t>(std::countr_zero(live))];
        live &= live - 1;
      }
      if (next == 0) return false;
      cur = next;
    }
    return (cur >> accept_) & 1u;
  }
  StateSet cur = initial_;
  StateSet next(words_, 0);
  for (char c : s) {
    if (!step(cur, c, next)) return false;
    cur.swap(next);
  }
  return accepts(cur);
}

Pattern parse_pattern(std::string_view source) {
  Pattern p;
  p.source_ = std::string(source);
  auto ast = std::make_shared<PatternNode>(Parser(source).parse());
  p.nfa_ = std::make_shared<const Nfa>(*ast);
  p.ast_ = std::move(ast);
  return p;
}

bool full_match(const Pattern& p, std::string_view s) { return p.nfa().matches(s); }

}  // namespace metaseg
