#pragma once

// Intent classification and slot extraction over configured phrase
// templates. A template is a sequence of anchor words and typed slots,
// e.g. "add a {objName:object} in {posY:row} on the {posX:column}".

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vesna/error.hpp"
#include "vesna/json_util.hpp"
#include "vesna/text.hpp"

namespace vesna::nlu {

enum class ValueDomain {
  catalog_name,
  grid_column,
  grid_row,
  relative_relation,
  reference_name,
  free_text,
};

inline constexpr std::array<std::string_view, 3> kGridColumns = {"left", "center", "right"};
inline constexpr std::array<std::string_view, 3> kGridRows = {"front", "center", "back"};
inline constexpr std::array<std::string_view, 4> kRelations = {"left of", "right of", "behind",
                                                               "in front of"};

inline std::string_view to_string(ValueDomain d) {
  switch (d) {
    case ValueDomain::catalog_name: return "catalog-name";
    case ValueDomain::grid_column: return "grid-column-token";
    case ValueDomain::grid_row: return "grid-row-token";
    case ValueDomain::relative_relation: return "relative-relation-token";
    case ValueDomain::reference_name: return "reference-name";
    case ValueDomain::free_text: return "free-text";
  }
  return "?";
}

inline std::optional<ValueDomain> parse_domain(std::string_view s) {
  for (auto d : {ValueDomain::catalog_name, ValueDomain::grid_column, ValueDomain::grid_row,
                 ValueDomain::relative_relation, ValueDomain::reference_name,
                 ValueDomain::free_text}) {
    if (to_string(d) == s) return d;
  }
  return std::nullopt;
}

struct EntityKind {
  std::string name;
  ValueDomain domain;
};

struct Anchor {
  std::string word;  // folded
};

struct Slot {
  std::string param;
  std::string entity;
};

using PhraseElement = std::variant<Anchor, Slot>;

struct Phrase {
  std::string text;
  std::vector<PhraseElement> elements;

  std::size_t anchor_count() const {
    return static_cast<std::size_t>(std::count_if(elements.begin(), elements.end(), [](auto& e) {
      return std::holds_alternative<Anchor>(e);
    }));
  }

  std::vector<Slot> slots() const {
    std::vector<Slot> out;
    for (const auto& e : elements) {
      if (auto* s = std::get_if<Slot>(&e)) out.push_back(*s);
    }
    return out;
  }
};

struct IntentDef {
  std::string name;
  std::vector<Phrase> training_phrases;
  bool fulfillment = false;
  std::optional<std::string> static_response;
  std::vector<std::string> parameters;  // declared order of extracted params; may be empty
};

struct IntentMatch {
  std::string intent;
  std::map<std::string, std::string> params;
  double confidence = 0.0;
  std::optional<std::size_t> matched_phrase;  // nullopt for the fallback match

  bool is_fallback() const { return !matched_phrase.has_value(); }
};

struct NluConfig {
  std::vector<IntentDef> intents;
  std::vector<EntityKind> entities;
  std::string fallback_intent_name = "Fallback";
  std::string fallback_response = "Sorry, I did not understand that.";
  double confidence_threshold = 0.6;

  const IntentDef* find_intent(std::string_view name) const {
    for (const auto& i : intents)
      if (i.name == name) return &i;
    return nullptr;
  }

  const EntityKind* find_entity(std::string_view name) const {
    for (const auto& e : entities)
      if (e.name == name) return &e;
    return nullptr;
  }
};

namespace detail {

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return is_identifier_char(c); });
}

inline bool is_entity_name(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return is_identifier_char(c) || c == '-';
  });
}

inline Phrase parse_phrase(const std::string& text, const std::string& where) {
  Phrase phrase{text, {}};
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::string_view word = std::string_view(text).substr(start, i - start);
    if (word.empty()) continue;

    if (word.find('{') != std::string_view::npos || word.find('}') != std::string_view::npos) {
      auto colon = word.find(':');
      if (word.front() != '{' || word.back() != '}' || colon == std::string_view::npos) {
        throw ConfigError(where + ": malformed slot \"" + std::string(word) +
                          "\" (expected {param:entity})");
      }
      std::string param(word.substr(1, colon - 1));
      std::string entity(word.substr(colon + 1, word.size() - colon - 2));
      if (!is_identifier(param) || !is_entity_name(entity)) {
        throw ConfigError(where + ": malformed slot \"" + std::string(word) + "\"");
      }
      phrase.elements.emplace_back(Slot{param, entity});
      continue;
    }
    for (auto& t : tokenize(word)) phrase.elements.emplace_back(Anchor{t.folded});
  }
  return phrase;
}

}  // namespace detail

/// Validates every structural invariant of a config. Throws ConfigError.
inline void validate(const NluConfig& config) {
  if (config.intents.empty()) throw ConfigError("nlu: schema violation: intents list is empty");
  if (!(config.confidence_threshold >= 0.0 && config.confidence_threshold <= 1.0)) {
    throw ConfigError("nlu: confidence_threshold must lie in [0, 1]");
  }

  std::set<std::string> entity_names;
  for (const auto& e : config.entities) {
    if (!entity_names.insert(e.name).second) {
      throw ConfigError("nlu: duplicate entity \"" + e.name + "\"");
    }
  }

  std::set<std::string> intent_names;
  for (const auto& intent : config.intents) {
    const std::string where = "nlu: intent \"" + intent.name + "\"";
    if (!detail::is_identifier(intent.name)) throw ConfigError(where + ": invalid intent name");
    if (!intent_names.insert(intent.name).second) {
      throw ConfigError("nlu: duplicate intent \"" + intent.name + "\"");
    }
    if (intent.name == config.fallback_intent_name) {
      throw ConfigError(where + ": fallback intent must not be a configured intent");
    }
    if (intent.training_phrases.empty()) {
      throw ConfigError(where + ": schema violation: no training phrases");
    }
    if (!intent.fulfillment && !intent.static_response) {
      throw ConfigError(where + ": intents without fulfillment need a static_response");
    }

    std::vector<std::string> placeholders;
    if (intent.static_response) placeholders = template_placeholders(*intent.static_response);

    for (const auto& phrase : intent.training_phrases) {
      const std::string pwhere = where + " phrase \"" + phrase.text + "\"";
      if (phrase.anchor_count() == 0) throw ConfigError(pwhere + ": phrase has no anchor words");
      std::set<std::string> params;
      for (const auto& slot : phrase.slots()) {
        if (!intent.parameters.empty() &&
            std::find(intent.parameters.begin(), intent.parameters.end(), slot.param) ==
                intent.parameters.end()) {
          throw ConfigError(pwhere + ": slot parameter \"" + slot.param +
                            "\" is not listed in the intent's parameters");
        }
        if (!config.find_entity(slot.entity)) {
          throw ConfigError(pwhere + ": undeclared entity kind \"" + slot.entity + "\"");
        }
        if (!params.insert(slot.param).second) {
          throw ConfigError(pwhere + ": duplicate parameter \"" + slot.param + "\"");
        }
      }
      for (const auto& p : placeholders) {
        if (!params.count(p)) {
          throw ConfigError(pwhere + ": static_response uses {" + p +
                            "} which is not a slot of this phrase");
        }
      }
    }
  }
}

/// Parses and validates an NLU config document (JSON).
inline NluConfig load_nlu_config(std::string_view document) {
  using namespace vesna::detail;
  const json doc = parse_document(document, "nlu");
  expect_object(doc, "nlu",
                {"schema_version", "confidence_threshold", "fallback_intent", "fallback_response",
                 "entities", "intents"});
  check_schema_version(doc, "nlu");

  NluConfig config;
  if (doc.contains("confidence_threshold")) {
    config.confidence_threshold = require_number(doc, "confidence_threshold", "nlu");
  }
  if (doc.contains("fallback_intent")) {
    config.fallback_intent_name = require_string(doc, "fallback_intent", "nlu");
  }
  if (doc.contains("fallback_response")) {
    config.fallback_response = require_string(doc, "fallback_response", "nlu");
  }

  for (const auto& e : require_array(doc, "entities", "nlu")) {
    expect_object(e, "nlu.entities[]", {"name", "domain"});
    std::string name = require_string(e, "name", "nlu.entities[]");
    const std::string where = "nlu: entity \"" + name + "\"";
    if (!nlu::detail::is_entity_name(name)) throw ConfigError(where + ": invalid entity name");
    std::string domain = require_string(e, "domain", where);
    auto d = parse_domain(domain);
    if (!d) throw ConfigError(where + ": unknown domain \"" + domain + "\"");
    config.entities.push_back({name, *d});
  }

  for (const auto& i : require_array(doc, "intents", "nlu")) {
    expect_object(i, "nlu.intents[]",
                  {"name", "fulfillment", "parameters", "training_phrases", "static_response"});
    IntentDef intent;
    intent.name = require_string(i, "name", "nlu.intents[]");
    const std::string where = "nlu: intent \"" + intent.name + "\"";
    const auto& f = require(i, "fulfillment", where);
    if (!f.is_boolean()) throw ConfigError(where + ".fulfillment: expected a boolean");
    intent.fulfillment = f.get<bool>();
    if (i.contains("static_response")) intent.static_response = require_string(i, "static_response", where);
    if (i.contains("parameters")) {
      for (const auto& p : require_array(i, "parameters", where)) {
        if (!p.is_string()) throw ConfigError(where + ".parameters: expected strings");
        intent.parameters.push_back(p.get<std::string>());
      }
    }
    for (const auto& p : require_array(i, "training_phrases", where)) {
      if (!p.is_string()) throw ConfigError(where + ".training_phrases: expected strings");
      intent.training_phrases.push_back(nlu::detail::parse_phrase(p.get<std::string>(), where));
    }
    config.intents.push_back(std::move(intent));
  }

  validate(config);
  return config;
}

namespace detail {

struct DomainValue {
  std::vector<std::string> tokens;  // folded
  std::string value;                // returned form
};

struct Alignment {
  std::size_t anchors = 0;
  std::vector<std::size_t> span_lengths;  // one per slot, template order
  std::vector<std::pair<std::string, std::string>> bindings;

  // More anchors first, then longer slot spans in template order.
  bool better_than(const Alignment& o) const {
    if (anchors != o.anchors) return anchors > o.anchors;
    return span_lengths > o.span_lengths;
  }
};

class PhraseMatcher {
 public:
  PhraseMatcher(const NluConfig& config, const std::vector<DomainValue>& catalog,
                const std::vector<DomainValue>& refs, const std::vector<DomainValue>& columns,
                const std::vector<DomainValue>& rows, const std::vector<DomainValue>& relations,
                const std::vector<Token>& tokens)
      : config_(config),
        catalog_(catalog),
        refs_(refs),
        columns_(columns),
        rows_(rows),
        relations_(relations),
        tokens_(tokens) {}

  std::optional<Alignment> align(const Phrase& phrase) {
    phrase_ = &phrase;
    memo_.assign((phrase.elements.size() + 1) * (tokens_.size() + 1), std::nullopt);
    done_.assign(memo_.size(), false);
    return best(0, 0);
  }

 private:
  std::size_t index(std::size_t e, std::size_t i) const { return e * (tokens_.size() + 1) + i; }

  const std::vector<DomainValue>* values_for(ValueDomain d) const {
    switch (d) {
      case ValueDomain::catalog_name: return &catalog_;
      case ValueDomain::reference_name: return &refs_;
      case ValueDomain::grid_column: return &columns_;
      case ValueDomain::grid_row: return &rows_;
      case ValueDomain::relative_relation: return &relations_;
      case ValueDomain::free_text: return nullptr;
    }
    return nullptr;
  }

  // Value of the span [start, end) if it belongs to the slot's domain.
  std::optional<std::string> bind(const Slot& slot, std::size_t start, std::size_t end) const {
    const auto* entity = config_.find_entity(slot.entity);
    if (!entity) return std::nullopt;
    if (entity->domain == ValueDomain::free_text) {
      std::string raw;
      for (std::size_t k = start; k < end; ++k) {
        if (k > start) raw += ' ';
        raw += tokens_[k].raw;
      }
      return raw;
    }
    const std::size_t len = end - start;
    for (const auto& v : *values_for(entity->domain)) {
      if (v.tokens.size() != len) continue;
      bool same = true;
      for (std::size_t k = 0; k < len && same; ++k) same = v.tokens[k] == tokens_[start + k].folded;
      if (same) return v.value;
    }
    return std::nullopt;
  }

  static void consider(std::optional<Alignment>& best, Alignment&& candidate) {
    if (!best || candidate.better_than(*best)) best = std::move(candidate);
  }

  std::optional<Alignment> best(std::size_t e, std::size_t i) {
    const auto& elements = phrase_->elements;
    if (e == elements.size()) return Alignment{};
    const std::size_t key = index(e, i);
    if (done_[key]) return memo_[key];

    std::optional<Alignment> result;
    const std::size_t n = tokens_.size();
    if (const auto* anchor = std::get_if<Anchor>(&elements[e])) {
      if (auto rest = best(e + 1, i)) consider(result, std::move(*rest));
      for (std::size_t k = i; k < n; ++k) {
        if (tokens_[k].folded != anchor->word) continue;
        if (auto rest = best(e + 1, k + 1)) {
          rest->anchors += 1;
          consider(result, std::move(*rest));
        }
      }
    } else {
      const auto& slot = std::get<Slot>(elements[e]);
      for (std::size_t start = i; start < n; ++start) {
        for (std::size_t end = start + 1; end <= n; ++end) {
          auto value = bind(slot, start, end);
          if (!value) continue;
          auto rest = best(e + 1, end);
          if (!rest) continue;
          rest->span_lengths.insert(rest->span_lengths.begin(), end - start);
          rest->bindings.insert(rest->bindings.begin(), {slot.param, *value});
          consider(result, std::move(*rest));
        }
      }
    }

    done_[key] = true;
    memo_[key] = result;
    return result;
  }

  const NluConfig& config_;
  const std::vector<DomainValue>& catalog_;
  const std::vector<DomainValue>& refs_;
  const std::vector<DomainValue>& columns_;
  const std::vector<DomainValue>& rows_;
  const std::vector<DomainValue>& relations_;
  const std::vector<Token>& tokens_;
  const Phrase* phrase_ = nullptr;
  std::vector<std::optional<Alignment>> memo_;
  std::vector<bool> done_;
};

template <typename Range>
std::vector<DomainValue> domain_values(const Range& values) {
  std::vector<DomainValue> out;
  for (const auto& v : values) {
    std::string value(v);
    auto tokens = normalize(value);
    if (!tokens.empty()) out.push_back({std::move(tokens), std::move(value)});
  }
  return out;
}

}  // namespace detail

/// Classifies `utterance` against every training phrase. Score is the
/// fraction of a phrase's anchor words found in order; slots must all bind
/// to spans from their value domain, preferring the longest span. Ties go to
/// the earliest intent, then the earliest phrase. Below the threshold the
/// fallback match is returned.
inline IntentMatch classify(const NluConfig& config, const std::set<std::string>& catalog_names,
                            const std::set<std::string>& scene_refs, std::string_view utterance) {
  const auto tokens = tokenize(utterance);
  const auto catalog = detail::domain_values(catalog_names);
  const auto refs = detail::domain_values(scene_refs);
  const auto columns = detail::domain_values(kGridColumns);
  const auto rows = detail::domain_values(kGridRows);
  const auto relations = detail::domain_values(kRelations);
  detail::PhraseMatcher matcher(config, catalog, refs, columns, rows, relations, tokens);

  IntentMatch best{config.fallback_intent_name, {}, 0.0, std::nullopt};
  double best_score = -1.0;
  for (const auto& intent : config.intents) {
    for (std::size_t p = 0; p < intent.training_phrases.size(); ++p) {
      const auto& phrase = intent.training_phrases[p];
      auto alignment = matcher.align(phrase);
      if (!alignment) continue;
      const double score =
          static_cast<double>(alignment->anchors) / static_cast<double>(phrase.anchor_count());
      if (score > best_score) {
        best_score = score;
        best.intent = intent.name;
        best.params.clear();
        for (auto& [k, v] : alignment->bindings) best.params[k] = v;
        best.confidence = score;
        best.matched_phrase = p;
      }
    }
  }

  if (best_score < config.confidence_threshold || best_score <= 0.0) {
    return IntentMatch{config.fallback_intent_name, {}, 0.0, std::nullopt};
  }
  return best;
}

/// The match's parameters in the intent's declared order; undeclared ones
/// follow in name order.
inline std::vector<std::pair<std::string, std::string>> ordered_params(const IntentDef& intent,
                                                                       const IntentMatch& match) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> used;
  for (const auto& name : intent.parameters) {
    auto it = match.params.find(name);
    if (it == match.params.end()) continue;
    out.emplace_back(it->first, it->second);
    used.insert(name);
  }
  for (const auto& [k, v] : match.params) {
    if (!used.count(k)) out.emplace_back(k, v);
  }
  return out;
}

/// Fills an intent's fixed reply with the matched parameter values.
inline std::string render_static_response(const IntentDef& intent, const IntentMatch& match) {
  if (!intent.static_response) {
    throw TemplateError("intent \"" + intent.name + "\" has no static response");
  }
  return render_template(*intent.static_response,
                         [&](const std::string& name) -> std::optional<std::string> {
                           auto it = match.params.find(name);
                           if (it == match.params.end()) return std::nullopt;
                           return it->second;
                         });
}

}  // namespace vesna::nlu
