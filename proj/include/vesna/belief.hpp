#pragma once

// Jason-style ground terms and beliefs.
//
//   belief := functor | functor '(' term (',' term)* ')'
//   term   := atom | string | list | param
//   param  := 'param' '(' string ',' string ')'
//   list   := '[' (term (',' term)*)? ']'
//
// Plan patterns reuse the same syntax with variables (uppercase-initial
// identifiers, `_` as wildcard) allowed wherever a term may appear.

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vesna/error.hpp"

namespace vesna {

struct Term {
  enum class Kind { atom, string, list, param, var };

  Kind kind = Kind::atom;
  std::string text;         // atom name, string value, variable name
  std::vector<Term> items;  // list elements, or {name, value} for param

  static Term atom(std::string name) { return {Kind::atom, std::move(name), {}}; }
  static Term string(std::string value) { return {Kind::string, std::move(value), {}}; }
  static Term list(std::vector<Term> items) { return {Kind::list, {}, std::move(items)}; }
  static Term var(std::string name) { return {Kind::var, std::move(name), {}}; }
  static Term param(std::string name, std::string value) {
    return {Kind::param, {}, {string(std::move(name)), string(std::move(value))}};
  }
  static Term param(Term name, Term value) {
    return {Kind::param, {}, {std::move(name), std::move(value)}};
  }

  bool is_ground() const {
    if (kind == Kind::var) return false;
    for (const auto& t : items)
      if (!t.is_ground()) return false;
    return true;
  }

  friend bool operator==(const Term&, const Term&) = default;
};

struct Belief {
  std::string functor;
  std::vector<Term> args;

  friend bool operator==(const Belief&, const Belief&) = default;
};

namespace detail {

inline void render_string(std::string& out, std::string_view s) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
}

inline void render_term(std::string& out, const Term& t) {
  switch (t.kind) {
    case Term::Kind::atom:
    case Term::Kind::var: out += t.text; break;
    case Term::Kind::string: render_string(out, t.text); break;
    case Term::Kind::param:
      out += "param(";
      render_term(out, t.items.at(0));
      out.push_back(',');
      render_term(out, t.items.at(1));
      out.push_back(')');
      break;
    case Term::Kind::list:
      out.push_back('[');
      for (std::size_t i = 0; i < t.items.size(); ++i) {
        if (i) out.push_back(',');
        render_term(out, t.items[i]);
      }
      out.push_back(']');
      break;
  }
}

class TermParser {
 public:
  TermParser(std::string_view text, bool allow_vars) : text_(text), allow_vars_(allow_vars) {}

  Belief parse_structure() {
    Belief b;
    skip_ws();
    b.functor = identifier();
    if (!is_lower(b.functor.front())) fail(pos_ - b.functor.size(), "functor must start lowercase");
    skip_ws();
    if (peek() == '(') {
      ++pos_;
      b.args.push_back(term());
      skip_ws();
      while (peek() == ',') {
        ++pos_;
        b.args.push_back(term());
        skip_ws();
      }
      expect(')');
    }
    return b;
  }

  Term parse_single_term() { return term(); }

  void finish() {
    skip_ws();
    if (pos_ != text_.size()) fail(pos_, "unexpected trailing input");
  }

  std::size_t position() const { return pos_; }

 private:
  static bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
  static bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  [[noreturn]] void fail(std::size_t at, const std::string& what) const { throw ParseError(at, what); }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size()) fail(pos_, std::string("expected '") + c + "' but input ended");
    if (text_[pos_] != c) fail(pos_, std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ >= text_.size()) fail(pos_, "expected identifier but input ended");
    if (!(std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      fail(pos_, "expected identifier");
    }
    while (pos_ < text_.size() && is_ident(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string quoted() {
    skip_ws();
    expect('"');
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) fail(pos_, "unterminated string");
      char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (pos_ >= text_.size()) fail(pos_, "unterminated escape");
      char e = text_[pos_++];
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        default: fail(pos_ - 1, std::string("unknown escape '\\") + e + "'");
      }
    }
    return out;
  }

  Term term() {
    skip_ws();
    if (pos_ >= text_.size()) fail(pos_, "expected term but input ended");
    const char c = text_[pos_];
    if (c == '"') return Term::string(quoted());
    if (c == '[') {
      ++pos_;
      std::vector<Term> items;
      skip_ws();
      if (peek() == ']') {
        ++pos_;
        return Term::list(std::move(items));
      }
      items.push_back(term());
      skip_ws();
      while (peek() == ',') {
        ++pos_;
        items.push_back(term());
        skip_ws();
      }
      expect(']');
      return Term::list(std::move(items));
    }

    const std::size_t start = pos_;
    std::string name = identifier();
    if (!is_lower(name.front())) {
      if (!allow_vars_) fail(start, "atoms must start with a lowercase letter");
      return Term::var(std::move(name));
    }
    skip_ws();
    if (name == "param" && peek() == '(') {
      ++pos_;
      Term key = param_arg();
      expect(',');
      Term value = param_arg();
      expect(')');
      return Term::param(std::move(key), std::move(value));
    }
    if (peek() == '(') fail(pos_, "compound terms other than param(...) are not allowed here");
    return Term::atom(std::move(name));
  }

  Term param_arg() {
    skip_ws();
    if (peek() == '"') return Term::string(quoted());
    if (allow_vars_ && pos_ < text_.size() && !is_lower(text_[pos_]) &&
        (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      return Term::var(identifier());
    }
    fail(pos_, pos_ >= text_.size() ? "expected string but input ended" : "expected string");
  }

  std::string_view text_;
  bool allow_vars_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a ground belief. Throws ParseError with the 0-based offset.
inline Belief parse_belief(std::string_view text) {
  detail::TermParser p(text, false);
  Belief b = p.parse_structure();
  p.finish();
  return b;
}

/// Canonical form: no whitespace, strings double-quoted and escaped.
inline std::string render(const Term& t) {
  std::string out;
  detail::render_term(out, t);
  return out;
}

inline std::string render_belief(const Belief& b) {
  std::string out = b.functor;
  if (!b.args.empty()) {
    out.push_back('(');
    for (std::size_t i = 0; i < b.args.size(); ++i) {
      if (i) out.push_back(',');
      detail::render_term(out, b.args[i]);
    }
    out.push_back(')');
  }
  return out;
}

/// The belief a fulfillment request becomes:
/// request(Source, SessionId, IntentName, [param(N,V), ...], Extra).
struct RequestBelief {
  std::string source = "undefined";
  std::string session_id;
  std::string intent_name;
  std::vector<std::pair<std::string, std::string>> params;
  Term extra = Term::atom("none");

  Belief to_belief() const {
    std::vector<Term> plist;
    for (const auto& [k, v] : params) plist.push_back(Term::param(k, v));
    return Belief{"request",
                  {Term::string(source), Term::string(session_id), Term::string(intent_name),
                   Term::list(std::move(plist)), extra}};
  }

  std::optional<std::string> param(std::string_view name) const {
    for (const auto& [k, v] : params)
      if (k == name) return v;
    return std::nullopt;
  }

  /// nullopt when `b` does not have the request shape.
  static std::optional<RequestBelief> from_belief(const Belief& b) {
    if (b.functor != "request" || b.args.size() != 5) return std::nullopt;
    for (int i = 0; i < 3; ++i)
      if (b.args[i].kind != Term::Kind::string) return std::nullopt;
    if (b.args[3].kind != Term::Kind::list) return std::nullopt;
    RequestBelief r;
    r.source = b.args[0].text;
    r.session_id = b.args[1].text;
    r.intent_name = b.args[2].text;
    for (const auto& p : b.args[3].items) {
      if (p.kind != Term::Kind::param) return std::nullopt;
      r.params.emplace_back(p.items[0].text, p.items[1].text);
    }
    r.extra = b.args[4];
    return r;
  }

  friend bool operator==(const RequestBelief&, const RequestBelief&) = default;
};

}  // namespace vesna
