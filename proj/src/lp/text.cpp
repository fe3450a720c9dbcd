#include "streamasp/lp/text.hpp"

#include <cctype>
#include <charconv>

#include "streamasp/error.hpp"

namespace streamasp::lp {

std::string format_interval(const Interval& card, const AtomTable& atoms) {
  std::string out = "1{";
  out += atoms.predicate_name(card.predicate);
  out += '(';
  out += std::to_string(card.from);
  out += "..";
  out += std::to_string(card.to);
  out += ")}";
  return out;
}

std::string format_rule(const GroundRule& rule, const AtomTable& atoms) {
  std::string out;
  if (rule.head) out = atoms.to_string(*rule.head);
  if (rule.is_fact()) return out + '.';
  out += rule.head ? " :- " : ":- ";
  bool first = true;
  auto sep = [&] {
    if (!first) out += ", ";
    first = false;
  };
  for (AtomId a : rule.pos) {
    sep();
    out += atoms.to_string(a);
  }
  for (AtomId a : rule.neg) {
    sep();
    out += "not ";
    out += atoms.to_string(a);
  }
  if (rule.card) {
    sep();
    out += format_interval(*rule.card, atoms);
  }
  out += '.';
  return out;
}

std::string format_rules(std::span<const GroundRule> rules, const AtomTable& atoms) {
  std::string out;
  for (const GroundRule& r : rules) {
    out += format_rule(r, atoms);
    out += '\n';
  }
  return out;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, AtomTable& atoms) : text_(text), atoms_(atoms) {}

  std::vector<GroundRule> program() {
    std::vector<GroundRule> rules;
    for (;;) {
      skip_space();
      if (at_end()) break;
      rules.push_back(rule());
    }
    return rules;
  }

 private:
  GroundRule rule() {
    GroundRule r;
    if (!lookahead(":-")) r.head = atom();
    skip_space();
    if (lookahead(":-")) {
      pos_ += 2;
      body(r);
    } else if (!r.head) {
      fail("expected rule");
    }
    skip_space();
    expect('.');
    return r;
  }

  void body(GroundRule& r) {
    skip_space();
    if (peek() == '.') return;  // `:- .` is the always-violated constraint
    for (;;) {
      skip_space();
      if (peek() == '1' && peek(1) == '{') {
        if (r.card) fail("at most one interval element per rule");
        r.card = interval();
      } else if (keyword("not")) {
        r.neg.push_back(atom());
      } else {
        r.pos.push_back(atom());
      }
      skip_space();
      if (peek() != ',') break;
      ++pos_;
    }
  }

  Interval interval() {
    pos_ += 2;
    skip_space();
    Interval card;
    card.predicate = atoms_.predicate(name());
    skip_space();
    expect('(');
    skip_space();
    card.from = integer();
    skip_space();
    if (!lookahead("..")) fail("expected '..'");
    pos_ += 2;
    skip_space();
    card.to = integer();
    skip_space();
    expect(')');
    skip_space();
    expect('}');
    return card;
  }

  AtomId atom() {
    skip_space();
    PredId pred = atoms_.predicate(name());
    std::vector<Term> args;
    skip_space();
    if (peek() == '(') {
      ++pos_;
      for (;;) {
        skip_space();
        args.push_back(term());
        skip_space();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        expect(')');
        break;
      }
    }
    return atoms_.atom(pred, args);
  }

  Term term() {
    char c = peek();
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) return Term::integer(integer());
    return atoms_.symbol(name());
  }

  std::string_view name() {
    std::size_t start = pos_;
    if (!std::islower(static_cast<unsigned char>(peek()))) {
      fail("expected a lower-case identifier");
    }
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    std::string_view id = text_.substr(start, pos_ - start);
    if (id == "not") {
      pos_ = start;
      fail("'not' is reserved");
    }
    return id;
  }

  std::int64_t integer() {
    std::size_t start = pos_;
    if (peek() == '-') ++pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("expected an integer");
    }
    return value;
  }

  bool keyword(std::string_view word) {
    if (!lookahead(word)) return false;
    std::size_t after = pos_ + word.size();
    if (after < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[after])) || text_[after] == '_')) {
      return false;
    }
    pos_ = after;
    return true;
  }

  void skip_space() {
    while (!at_end()) {
      char c = text_[pos_];
      if (c == '%') {
        while (!at_end() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  bool lookahead(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  bool at_end() const { return pos_ >= text_.size(); }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(what, line, column);
  }

  std::string_view text_;
  AtomTable& atoms_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<GroundRule> parse_program(std::string_view text, AtomTable& atoms) {
  return Parser(text, atoms).program();
}

}  // namespace streamasp::lp
