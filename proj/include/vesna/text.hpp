#pragma once

#include <cctype>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vesna/error.hpp"

namespace vesna {

// A token as the user typed it plus its lowercased matching form.
struct Token {
  std::string raw;
  std::string folded;
};

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

// Punctuation kept when it sits between two word characters ("MA2010#2",
// "IRB-2600", "o'neil").
inline bool is_joiner(char c) {
  return c == '#' || c == '-' || c == '_' || c == '.' || c == '\'';
}

/// Splits an utterance into tokens. Leading and trailing punctuation is
/// stripped from every word; inside a word only joiner characters survive.
inline std::vector<Token> tokenize(std::string_view utterance) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < utterance.size()) {
    while (i < utterance.size() && std::isspace(static_cast<unsigned char>(utterance[i]))) ++i;
    std::size_t start = i;
    while (i < utterance.size() && !std::isspace(static_cast<unsigned char>(utterance[i]))) ++i;
    std::string_view word = utterance.substr(start, i - start);

    while (!word.empty() && is_ascii_punct(word.front())) word.remove_prefix(1);
    while (!word.empty() && is_ascii_punct(word.back())) word.remove_suffix(1);
    if (word.empty()) continue;

    std::string kept;
    for (char c : word) {
      if (!is_ascii_punct(c) || is_joiner(c)) kept.push_back(c);
    }
    if (kept.empty()) continue;
    tokens.push_back({kept, to_lower(kept)});
  }
  return tokens;
}

inline std::vector<std::string> normalize(std::string_view utterance) {
  std::vector<std::string> out;
  for (auto& t : tokenize(utterance)) out.push_back(std::move(t.folded));
  return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline bool is_unreserved(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_' ||
         c == '~';
}

/// RFC 3986 percent-encoding; everything outside the unreserved set is escaped.
inline std::string percent_encode(std::string_view s) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (is_unreserved(c)) {
      out.push_back(c);
    } else {
      auto b = static_cast<unsigned char>(c);
      out.push_back('%');
      out.push_back(hex[b >> 4]);
      out.push_back(hex[b & 0xF]);
    }
  }
  return out;
}

inline int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

/// Strict inverse of percent_encode. Returns nullopt on a truncated or
/// non-hex escape.
inline std::optional<std::string> percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out.push_back(s[i]);
      continue;
    }
    if (i + 2 >= s.size()) return std::nullopt;
    int hi = hex_value(s[i + 1]);
    int lo = hex_value(s[i + 2]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<char>((hi << 4) | lo));
    i += 2;
  }
  return out;
}

inline bool is_identifier_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// Substitutes `{name}` placeholders. `lookup` returns nullopt for an
/// unbound name, which is an error. A brace not forming a placeholder is
/// copied verbatim.
inline std::string render_template(
    std::string_view text,
    const std::function<std::optional<std::string>(const std::string&)>& lookup) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      std::size_t j = i + 1;
      while (j < text.size() && is_identifier_char(text[j])) ++j;
      if (j < text.size() && text[j] == '}' && j > i + 1) {
        std::string name(text.substr(i + 1, j - i - 1));
        auto value = lookup(name);
        if (!value) throw TemplateError("no value bound for placeholder {" + name + "}");
        out += *value;
        i = j + 1;
        continue;
      }
    }
    out.push_back(text[i++]);
  }
  return out;
}

/// Names of all `{name}` placeholders in order of appearance.
inline std::vector<std::string> template_placeholders(std::string_view text) {
  std::vector<std::string> names;
  render_template(text, [&](const std::string& name) -> std::optional<std::string> {
    names.push_back(name);
    return std::string{};
  });
  return names;
}

}  // namespace vesna
