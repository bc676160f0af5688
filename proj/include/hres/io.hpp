// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON documents: instances, outcomes (matching, fill report, offer log,
// audits) and single-institution choices. Objects are written with sorted
// keys so equal content always serializes to identical bytes.

#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hres/aggregate_choice.hpp"
#include "hres/cop.hpp"
#include "hres/instance.hpp"
#include "hres/oracles.hpp"

namespace hres {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Rank-order list expansion

/// Expands an institutions-only list into institution-category pairs: each
/// institution becomes (s, o) followed by (s, r) when the individual belongs
/// to reserved category r and discloses it.
inline std::vector<RawPreference> expand_rol(std::span<const std::string> institutions,
                                             Membership membership, bool disclose) {
  std::vector<RawPreference> out;
  const auto r = reserved_category(membership);
  for (const auto& s : institutions) {
    out.push_back({s, "o"});
    if (r && disclose) out.push_back({s, std::string{to_string(*r)}});
  }
  return out;
}

inline PreferenceList expand_rol(std::span<const InstitutionIndex> institutions,
                                 Membership membership, bool disclose) {
  PreferenceList out;
  const auto r = reserved_category(membership);
  for (InstitutionIndex s : institutions) {
    out.push_back({s, Category::kOpen});
    if (r && disclose) out.push_back({s, *r});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reading

namespace detail {

/// Line and column (1-based) of a byte offset.
inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1, column = 1;
  for (std::size_t k = 0; k < offset && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

class JsonReader {
 public:
  explicit JsonReader(std::vector<Issue>& errors) : errors_(&errors) {}

  void fail(const std::string& path, const std::string& message) {
    errors_->push_back({IssueCode::kParseError, path, message});
  }

  bool object(const Json& j, const std::string& path, std::initializer_list<std::string_view> keys) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    for (const auto& [k, v] : j.items()) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
        fail(path, "unknown key '" + k + "'");
      }
    }
    return true;
  }

  std::optional<std::string> string(const Json& j, const std::string& path) {
    if (!j.is_string()) {
      fail(path, "expected a string");
      return std::nullopt;
    }
    return j.get<std::string>();
  }

  std::optional<long long> integer(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) {
      fail(path, "expected an integer");
      return std::nullopt;
    }
    return j.get<long long>();
  }

  std::optional<bool> boolean(const Json& j, const std::string& path) {
    if (!j.is_boolean()) {
      fail(path, "expected true or false");
      return std::nullopt;
    }
    return j.get<bool>();
  }

  const Json* field(const Json& j, std::string_view key, const std::string& path, bool required) {
    const auto it = j.find(key);
    if (it == j.end()) {
      if (required) fail(path, "missing key '" + std::string{key} + "'");
      return nullptr;
    }
    return &*it;
  }

  bool array(const Json& j, const std::string& path) {
    if (!j.is_array()) {
      fail(path, "expected an array");
      return false;
    }
    return true;
  }

 private:
  std::vector<Issue>* errors_;
};

inline std::string key_path(const std::string& base, std::string_view key) {
  return base.empty() ? std::string{key} : base + "." + std::string{key};
}

}  // namespace detail

/// Parses document text, reporting syntax errors with line and column.
inline std::optional<Json> parse_json(const std::string& text, std::vector<Issue>& errors,
                                      const std::string& source = "") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, column] = detail::line_column(text, offset);
    std::string message = e.what();
    if (const auto pos = message.find("syntax error"); pos != std::string::npos) {
      message = message.substr(pos);
    }
    errors.push_back({IssueCode::kParseError, source,
                      "line " + std::to_string(line) + ", column " + std::to_string(column) +
                          ": " + message});
    return std::nullopt;
  }
}

inline std::optional<std::string> read_file(const std::string& path, std::vector<Issue>& errors) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    errors.push_back({IssueCode::kIoError, path, "cannot open file"});
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Structural decoding of an instance document; semantic checks are left
/// to validate_instance.
inline std::optional<RawInstance> instance_from_json(const Json& j, std::vector<Issue>& errors) {
  detail::JsonReader r(errors);
  const std::size_t before = errors.size();
  if (!r.object(j, "", {"schema_version", "tiebreak_by_id", "horizontal_types", "institutions",
                        "individuals"})) {
    return std::nullopt;
  }
  RawInstance raw;
  if (const auto* v = r.field(j, "schema_version", "", true)) {
    if (auto n = r.integer(*v, "schema_version")) raw.schema_version = static_cast<int>(*n);
  }
  if (const auto* v = r.field(j, "tiebreak_by_id", "", false)) {
    if (auto b = r.boolean(*v, "tiebreak_by_id")) raw.tiebreak_by_id = *b;
  }
  if (const auto* v = r.field(j, "horizontal_types", "", false); v && r.array(*v, "horizontal_types")) {
    for (std::size_t k = 0; k < v->size(); ++k) {
      const std::string path = detail::at("horizontal_types", k);
      const Json& t = (*v)[k];
      if (!r.object(t, path, {"id", "parent"})) continue;
      TypeDeclaration d;
      if (const auto* id = r.field(t, "id", path, true)) {
        if (auto s = r.string(*id, path + ".id")) d.id = *s;
      }
      if (const auto* p = r.field(t, "parent", path, false); p && !p->is_null()) {
        if (auto s = r.string(*p, path + ".parent")) d.parent = *s;
      }
      raw.horizontal_types.push_back(std::move(d));
    }
  }
  if (const auto* v = r.field(j, "institutions", "", true); v && r.array(*v, "institutions")) {
    for (std::size_t k = 0; k < v->size(); ++k) {
      const std::string path = detail::at("institutions", k);
      const Json& s = (*v)[k];
      if (!r.object(s, path, {"id", "total_capacity", "vertical_capacities",
                              "horizontal_reservations", "merit_scores"})) {
        continue;
      }
      RawInstitution inst;
      if (const auto* id = r.field(s, "id", path, true)) {
        if (auto x = r.string(*id, path + ".id")) inst.id = *x;
      }
      if (const auto* c = r.field(s, "total_capacity", path, true)) {
        if (auto x = r.integer(*c, path + ".total_capacity")) inst.total_capacity = *x;
      }
      if (const auto* vc = r.field(s, "vertical_capacities", path, false)) {
        const std::string p = path + ".vertical_capacities";
        if (vc->is_object()) {
          for (const auto& [cat, q] : vc->items()) {
            if (auto x = r.integer(q, p + "." + cat)) inst.vertical_capacities[cat] = *x;
          }
        } else {
          r.fail(p, "expected an object");
        }
      }
      if (const auto* hr = r.field(s, "horizontal_reservations", path, false)) {
        const std::string p = path + ".horizontal_reservations";
        if (hr->is_object()) {
          for (const auto& [cat, row] : hr->items()) {
            if (!row.is_object()) {
              r.fail(p + "." + cat, "expected an object");
              continue;
            }
            auto& out = inst.horizontal_reservations[cat];
            for (const auto& [t, q] : row.items()) {
              if (auto x = r.integer(q, p + "." + cat + "." + t)) out[t] = *x;
            }
          }
        } else {
          r.fail(p, "expected an object");
        }
      }
      if (const auto* ms = r.field(s, "merit_scores", path, true)) {
        const std::string p = path + ".merit_scores";
        if (ms->is_object()) {
          for (const auto& [who, score] : ms->items()) {
            if (score.is_number_integer()) {
              inst.merit_scores[who] = score.dump();
            } else if (score.is_string()) {
              inst.merit_scores[who] = score.get<std::string>();
            } else {
              errors.push_back({IssueCode::kBadScore, p + "." + who,
                                "score must be an integer or a decimal string"});
            }
          }
        } else {
          r.fail(p, "expected an object");
        }
      }
      raw.institutions.push_back(std::move(inst));
    }
  }
  if (const auto* v = r.field(j, "individuals", "", true); v && r.array(*v, "individuals")) {
    for (std::size_t k = 0; k < v->size(); ++k) {
      const std::string path = detail::at("individuals", k);
      const Json& i = (*v)[k];
      if (!r.object(i, path, {"id", "membership", "horizontal_types", "preferences", "rol",
                              "disclose"})) {
        continue;
      }
      RawIndividual ind;
      if (const auto* id = r.field(i, "id", path, true)) {
        if (auto x = r.string(*id, path + ".id")) ind.id = *x;
      }
      if (const auto* m = r.field(i, "membership", path, false)) {
        if (auto x = r.string(*m, path + ".membership")) ind.membership = *x;
      }
      if (const auto* h = r.field(i, "horizontal_types", path, false);
          h && r.array(*h, path + ".horizontal_types")) {
        for (std::size_t t = 0; t < h->size(); ++t) {
          if (auto x = r.string((*h)[t], detail::at(path + ".horizontal_types", t))) {
            ind.horizontal_types.push_back(*x);
          }
        }
      }
      const auto* prefs = r.field(i, "preferences", path, false);
      const auto* rol = r.field(i, "rol", path, false);
      if (prefs && rol) r.fail(path, "give either 'preferences' or 'rol', not both");
      if (prefs && r.array(*prefs, path + ".preferences")) {
        for (std::size_t e = 0; e < prefs->size(); ++e) {
          const std::string p = detail::at(path + ".preferences", e);
          const Json& pair = (*prefs)[e];
          if (!pair.is_array() || pair.size() != 2) {
            r.fail(p, "expected [institution, category]");
            continue;
          }
          auto s = r.string(pair[0], p + "[0]");
          auto c = r.string(pair[1], p + "[1]");
          if (s && c) ind.preferences.push_back({*s, *c});
        }
      }
      if (rol && r.array(*rol, path + ".rol")) {
        bool disclose = true;
        if (const auto* d = r.field(i, "disclose", path, false)) {
          if (auto b = r.boolean(*d, path + ".disclose")) disclose = *b;
        }
        std::vector<std::string> list;
        for (std::size_t e = 0; e < rol->size(); ++e) {
          if (auto s = r.string((*rol)[e], detail::at(path + ".rol", e))) list.push_back(*s);
        }
        const auto m = parse_membership(ind.membership).value_or(Membership::kGeneral);
        ind.preferences = expand_rol(std::span<const std::string>(list), m, disclose);
      } else if (r.field(i, "disclose", path, false) != nullptr) {
        r.fail(path + ".disclose", "'disclose' only applies together with 'rol'");
      }
      raw.individuals.push_back(std::move(ind));
    }
  }
  if (errors.size() != before) return std::nullopt;
  return raw;
}

/// Reads, decodes and validates; every problem found lands in `errors`.
inline ValidationResult load_instance_text(const std::string& text, ValidationOptions options = {},
                                           const std::string& source = "") {
  ValidationResult result;
  const auto json = parse_json(text, result.errors, source);
  if (!json) return result;
  const auto raw = instance_from_json(*json, result.errors);
  if (!raw) return result;
  return validate_instance(*raw, options);
}

inline ValidationResult load_instance(const std::string& path, ValidationOptions options = {}) {
  ValidationResult result;
  const auto text = read_file(path, result.errors);
  if (!text) return result;
  return load_instance_text(*text, options, path);
}

// ---------------------------------------------------------------------------
// Writing

inline Json score_to_json(const Score& s) {
  if (s.is_integer() && s.text().size() <= 18) return std::stoll(s.text());
  return s.text();
}

inline Json instance_to_json(const RawInstance& raw) {
  Json j = Json::object();
  j["schema_version"] = raw.schema_version;
  if (raw.tiebreak_by_id) j["tiebreak_by_id"] = true;
  j["horizontal_types"] = Json::array();
  for (const auto& t : raw.horizontal_types) {
    Json d{{"id", t.id}};
    if (t.parent) d["parent"] = *t.parent;
    j["horizontal_types"].push_back(std::move(d));
  }
  j["institutions"] = Json::array();
  for (const auto& s : raw.institutions) {
    Json o{{"id", s.id}, {"total_capacity", s.total_capacity}};
    o["vertical_capacities"] = Json::object();
    for (const auto& [c, q] : s.vertical_capacities) o["vertical_capacities"][c] = q;
    o["horizontal_reservations"] = Json::object();
    for (const auto& [c, row] : s.horizontal_reservations) {
      Json r = Json::object();
      for (const auto& [t, q] : row) r[t] = q;
      o["horizontal_reservations"][c] = std::move(r);
    }
    o["merit_scores"] = Json::object();
    for (const auto& [who, text] : s.merit_scores) {
      const auto score = Score::parse(text);
      o["merit_scores"][who] = score ? score_to_json(*score) : Json(text);
    }
    j["institutions"].push_back(std::move(o));
  }
  j["individuals"] = Json::array();
  for (const auto& i : raw.individuals) {
    Json o{{"id", i.id}, {"membership", i.membership}};
    o["horizontal_types"] = i.horizontal_types;
    o["preferences"] = Json::array();
    for (const auto& p : i.preferences) o["preferences"].push_back({p.institution, p.category});
    j["individuals"].push_back(std::move(o));
  }
  return j;
}

inline Json instance_to_json(const Instance& instance) { return instance_to_json(instance.to_raw()); }

namespace detail {

/// Rewrites every array holding only scalars onto one line.
inline std::string inline_scalar_arrays(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '"') {
      const std::size_t start = i++;
      while (i < text.size() && text[i] != '"') i += text[i] == '\\' ? 2 : 1;
      out.append(text, start, ++i - start);
      continue;
    }
    if (c != '[') {
      out.push_back(c);
      ++i;
      continue;
    }
    // Scan to the closing bracket; give up on nested containers.
    std::size_t j = i + 1;
    bool flat = true;
    while (j < text.size() && text[j] != ']') {
      if (text[j] == '[' || text[j] == '{') {
        flat = false;
        break;
      }
      if (text[j] == '"') {
        ++j;
        while (j < text.size() && text[j] != '"') j += text[j] == '\\' ? 2 : 1;
      }
      ++j;
    }
    if (!flat || j >= text.size()) {
      out.push_back(c);
      ++i;
      continue;
    }
    out.push_back('[');
    bool first = true;
    std::size_t k = i + 1;
    while (k < j) {
      while (k < j && (text[k] == ' ' || text[k] == '\n' || text[k] == ',')) ++k;
      if (k >= j) break;
      std::size_t end = k;
      if (text[k] == '"') {
        ++end;
        while (end < j && text[end] != '"') end += text[end] == '\\' ? 2 : 1;
        ++end;
      } else {
        while (end < j && text[end] != ',' && text[end] != '\n' && text[end] != ' ') ++end;
      }
      if (!first) out += ", ";
      out.append(text, k, end - k);
      first = false;
      k = end;
    }
    out.push_back(']');
    i = j + 1;
  }
  return out;
}

}  // namespace detail

/// Canonical text: two-space indent, sorted keys, scalar arrays on one
/// line, trailing newline.
inline std::string to_text(const Json& j) {
  return detail::inline_scalar_arrays(j.dump(2)) + "\n";
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(IssueCode::kIoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(IssueCode::kIoError, "write failed for " + path);
}

inline void save_instance(const std::string& path, const Instance& instance) {
  write_file(path, to_text(instance_to_json(instance)));
}

// ---------------------------------------------------------------------------
// Outcomes

inline Json contract_to_json(const Instance& instance, const Contract& c) {
  return Json::array({instance.individual(c.person).id, instance.institution(c.institution).id,
                      std::string{to_string(c.category)}});
}

inline Json contracts_to_json(const Instance& instance, std::span<const Contract> cs) {
  Json out = Json::array();
  for (const auto& c : cs) out.push_back(contract_to_json(instance, c));
  return out;
}

inline Json people_to_json(const Instance& instance, std::span<const PersonIndex> people) {
  Json out = Json::array();
  for (PersonIndex p : people) out.push_back(instance.individual(p).id);
  return out;
}

inline Json type_counts_to_json(const Instance& instance, std::span<const int> counts) {
  Json out = Json::object();
  for (std::size_t t = 0; t < counts.size(); ++t) out[instance.forest().id(type(t))] = counts[t];
  return out;
}

inline Json trace_to_json(const Instance& instance, const ChoiceTrace& trace) {
  const auto& f = instance.forest();
  Json levels = Json::array();
  for (const auto& level : trace.levels) {
    Json types = Json::array();
    for (const auto& ts : level.types) {
      types.push_back({{"type", f.id(ts.type)},
                       {"quota", ts.quota},
                       {"effective_quota", ts.effective_quota},
                       {"clamp_bound", ts.clamp_bound},
                       {"considered", people_to_json(instance, ts.considered)},
                       {"selected", people_to_json(instance, ts.selected)},
                       {"capacity_after", ts.capacity_after}});
    }
    Json ids = Json::array();
    for (TypeIndex t : level.level) ids.push_back(f.id(t));
    levels.push_back({{"level", ids},
                      {"types", types},
                      {"quotas_after", type_counts_to_json(instance, level.quotas_after)}});
  }
  return {{"initial_capacity", trace.initial_capacity},
          {"levels", levels},
          {"merit_phase", people_to_json(instance, trace.merit_phase)},
          {"capacity_remaining", trace.capacity_remaining},
          {"exhausted_before_quotas", trace.exhausted_before_quotas}};
}

inline Json aggregate_to_json(const Instance& instance, const AggregateOutcome& outcome,
                              bool with_trace) {
  Json cats = Json::array();
  for (const auto& r : outcome.categories) {
    Json c{{"category", std::string{to_string(r.category)}},
           {"capacity", r.capacity},
           {"filled", r.chosen.size()},
           {"available", contracts_to_json(instance, r.available)},
           {"unavailable", contracts_to_json(instance, r.unavailable)},
           {"chosen", contracts_to_json(instance, r.chosen)},
           {"rejected", contracts_to_json(instance, r.rejected)},
           {"type_fill", type_counts_to_json(instance, r.type_fill)}};
    if (with_trace && r.category != Category::kDereserved) {
      c["trace"] = trace_to_json(instance, r.trace);
    }
    cats.push_back(std::move(c));
  }
  Json chosen = Json::array();
  for (const auto& a : outcome.chosen) {
    Json x = contract_to_json(instance, a.contract);
    chosen.push_back({{"contract", x}, {"seat_pool", std::string{to_string(a.seat_pool)}}});
  }
  return {{"institution", instance.institution(outcome.institution).id},
          {"chosen", chosen},
          {"categories", cats},
          {"obc_vacancies", outcome.obc_vacancies},
          {"dereserved_capacity", outcome.dereserved_capacity}};
}

/// Per-institution fill from final seats: capacity, filled count and
/// per-type counts for each seat pool.
inline Json fill_report(const Instance& instance, std::span<const SeatAssignment> seats,
                        Variant variant) {
  Json out = Json::array();
  for (std::size_t s = 0; s < instance.institution_count(); ++s) {
    const auto& inst = instance.institutions()[s];
    auto pools = standard_precedence(variant == Variant::kTransfer);
    std::vector<int> filled(pools.size(), 0);
    std::vector<std::vector<int>> types(pools.size(), std::vector<int>(instance.forest().size(), 0));
    for (const auto& a : seats) {
      if (a.contract.institution.value != s) continue;
      const std::size_t k = static_cast<std::size_t>(
          std::find(pools.begin(), pools.end(), a.seat_pool) - pools.begin());
      if (k >= pools.size()) continue;
      ++filled[k];
      for (TypeIndex t : instance.individual(a.contract.person).types.members()) ++types[k][t.value];
    }
    const int obc_filled = filled[slot_of(Category::kOBC)];
    Json cats = Json::array();
    for (std::size_t k = 0; k < pools.size(); ++k) {
      const int capacity = pools[k] == Category::kDereserved
                               ? std::max(0, inst.capacity[slot_of(Category::kOBC)] - obc_filled)
                               : inst.capacity[slot_of(pools[k])];
      cats.push_back({{"category", std::string{to_string(pools[k])}},
                      {"capacity", capacity},
                      {"filled", filled[k]},
                      {"type_fill", type_counts_to_json(instance, types[k])}});
    }
    out.push_back({{"institution", inst.id},
                   {"total_capacity", inst.total_capacity},
                   {"categories", cats}});
  }
  return out;
}

inline Json log_to_json(const Instance& instance, const OfferProcessLog& log) {
  Json steps = Json::array();
  for (const auto& st : log.steps) {
    Json cats = Json::array();
    for (const auto& c : st.categories) {
      cats.push_back({{"category", std::string{to_string(c.category)}},
                      {"capacity", c.capacity},
                      {"available", contracts_to_json(instance, c.available)},
                      {"chosen", contracts_to_json(instance, c.chosen)},
                      {"cumulative", contracts_to_json(instance, c.cumulative)},
                      {"chosen_from_cumulative",
                       contracts_to_json(instance, c.chosen_from_cumulative)},
                      {"rejected", contracts_to_json(instance, c.rejected)}});
    }
    steps.push_back({{"index", st.index},
                     {"proposer", instance.individual(st.proposer).id},
                     {"proposal", contract_to_json(instance, st.proposal)},
                     {"cumulative", contracts_to_json(instance, st.cumulative)},
                     {"held_after", contracts_to_json(instance, st.held_after)},
                     {"categories", cats}});
  }
  return {{"steps", steps},
          {"final_held", contracts_to_json(instance, log.final_held.contracts())}};
}

inline Json audit_to_json(const Instance& instance, const AuditReport& report) {
  Json ces = Json::array();
  for (const auto& c : report.counterexamples) {
    ces.push_back({{"kind", c.kind},
                   {"detail", c.detail},
                   {"contracts", contracts_to_json(instance, c.contracts)},
                   {"individuals", people_to_json(instance, c.individuals)}});
  }
  return {{"property", report.property},
          {"passed", report.passed()},
          {"checked", report.checked},
          {"counterexamples", ces}};
}

struct Invocation {
  std::string command;
  std::string instance;
  Variant variant = Variant::kPlain;
  ProposalPolicy policy;
  DereservedPool dereserved_pool = DereservedPool::kAnyRemainingContract;
  bool tiebreak_by_id = false;
};

inline std::string order_text(const ProposalPolicy& p) {
  return p.order == ProposalOrder::kLowestId ? "id" : "random:" + std::to_string(p.seed);
}

inline std::string pool_text(DereservedPool p) {
  return p == DereservedPool::kAnyRemainingContract ? "any" : "open-only";
}

inline Json invocation_to_json(const Invocation& inv) {
  return {{"command", inv.command},
          {"instance", inv.instance},
          {"variant", std::string{to_string(inv.variant)}},
          {"order", order_text(inv.policy)},
          {"dereserved_pool", pool_text(inv.dereserved_pool)},
          {"tiebreak", inv.tiebreak_by_id ? "id" : "none"}};
}

/// Full outcome document for a mechanism run.
inline Json outcome_to_json(const Instance& instance, const MechanismOutcome& outcome,
                            const Invocation& invocation, bool include_log,
                            std::span<const AuditReport> audits = {}) {
  Json matching = Json::array();
  for (const auto& a : outcome.seats) {
    matching.push_back({{"individual", instance.individual(a.contract.person).id},
                        {"institution", instance.institution(a.contract.institution).id},
                        {"category", std::string{to_string(a.contract.category)}},
                        {"seat_pool", std::string{to_string(a.seat_pool)}}});
  }
  Json unmatched = Json::array();
  for (PersonIndex p : instance.id_order()) {
    if (!outcome.assignment[p.value]) unmatched.push_back(instance.individual(p).id);
  }
  Json j{{"schema_version", kSchemaVersion},
         {"invocation", invocation_to_json(invocation)},
         {"matching", matching},
         {"unmatched", unmatched},
         {"steps", outcome.steps},
         {"fill", fill_report(instance, outcome.seats, invocation.variant)}};
  if (include_log) j["log"] = log_to_json(instance, outcome.log);
  if (!audits.empty()) {
    j["audits"] = Json::array();
    for (const auto& a : audits) j["audits"].push_back(audit_to_json(instance, a));
  }
  return j;
}

inline void save_outcome(const std::string& path, const Instance& instance,
                         const MechanismOutcome& outcome, const Invocation& invocation,
                         bool include_log, std::span<const AuditReport> audits = {}) {
  write_file(path, to_text(outcome_to_json(instance, outcome, invocation, include_log, audits)));
}

// ---------------------------------------------------------------------------
// Reading outcomes back

struct LoadedOutcome {
  Variant variant = Variant::kPlain;
  DereservedPool dereserved_pool = DereservedPool::kAnyRemainingContract;
  Matching matching;
  std::vector<SeatAssignment> seats;
  std::optional<OfferProcessLog> log;
};

namespace detail {

inline std::optional<Contract> contract_from_json(const Instance& instance, const Json& j,
                                                  const std::string& path,
                                                  std::vector<Issue>& errors) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_string() || !j[1].is_string() ||
      !j[2].is_string()) {
    errors.push_back({IssueCode::kParseError, path, "expected [individual, institution, category]"});
    return std::nullopt;
  }
  const auto p = instance.find_individual(j[0].get<std::string>());
  const auto s = instance.find_institution(j[1].get<std::string>());
  const auto c = parse_category(j[2].get<std::string>());
  if (!p) errors.push_back({IssueCode::kUnknownIndividual, path, j[0].get<std::string>()});
  if (!s) errors.push_back({IssueCode::kUnknownInstitution, path, j[1].get<std::string>()});
  if (!c) errors.push_back({IssueCode::kUnknownCategory, path, j[2].get<std::string>()});
  if (!p || !s || !c) return std::nullopt;
  return Contract{*p, *s, *c};
}

inline std::vector<Contract> contracts_from_json(const Instance& instance, const Json& j,
                                                 const std::string& path,
                                                 std::vector<Issue>& errors) {
  std::vector<Contract> out;
  if (!j.is_array()) {
    errors.push_back({IssueCode::kParseError, path, "expected an array of contracts"});
    return out;
  }
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (auto c = contract_from_json(instance, j[k], at(path, k), errors)) out.push_back(*c);
  }
  return out;
}

inline std::optional<OfferProcessLog> log_from_json(const Instance& instance, const Json& j,
                                                    std::vector<Issue>& errors) {
  const std::size_t before = errors.size();
  OfferProcessLog log;
  if (!j.is_object() || !j.contains("steps") || !j["steps"].is_array()) {
    errors.push_back({IssueCode::kMalformedLog, "log", "expected an object with 'steps'"});
    return std::nullopt;
  }
  for (std::size_t k = 0; k < j["steps"].size(); ++k) {
    const std::string path = at("log.steps", k);
    const Json& s = j["steps"][k];
    if (!s.is_object() || !s.value("index", Json()).is_number_unsigned() ||
        !s.value("proposer", Json()).is_string() || !s.contains("categories") ||
        !s["categories"].is_array()) {
      errors.push_back({IssueCode::kMalformedLog, path, "incomplete step"});
      continue;
    }
    OfferStep st;
    st.index = s["index"].get<std::size_t>();
    if (auto p = instance.find_individual(s["proposer"].get<std::string>())) {
      st.proposer = *p;
    } else {
      errors.push_back({IssueCode::kUnknownIndividual, path + ".proposer", "unknown"});
    }
    if (auto c = contract_from_json(instance, s.value("proposal", Json()), path + ".proposal",
                                    errors)) {
      st.proposal = *c;
    }
    st.cumulative = contracts_from_json(instance, s.value("cumulative", Json()),
                                        path + ".cumulative", errors);
    st.held_after = contracts_from_json(instance, s.value("held_after", Json()),
                                        path + ".held_after", errors);
    for (std::size_t c = 0; c < s["categories"].size(); ++c) {
      const std::string cp = at(path + ".categories", c);
      const Json& cj = s["categories"][c];
      CategorySnapshot snap;
      const auto cat = parse_category(cj.value("category", std::string{}));
      if (!cat || !cj.value("capacity", Json()).is_number_integer()) {
        errors.push_back({IssueCode::kMalformedLog, cp, "bad category snapshot"});
        continue;
      }
      snap.category = *cat;
      snap.capacity = cj["capacity"].get<int>();
      snap.available = contracts_from_json(instance, cj.value("available", Json()),
                                           cp + ".available", errors);
      snap.chosen =
          contracts_from_json(instance, cj.value("chosen", Json()), cp + ".chosen", errors);
      snap.cumulative = contracts_from_json(instance, cj.value("cumulative", Json()),
                                            cp + ".cumulative", errors);
      snap.chosen_from_cumulative =
          contracts_from_json(instance, cj.value("chosen_from_cumulative", Json()),
                              cp + ".chosen_from_cumulative", errors);
      snap.rejected =
          contracts_from_json(instance, cj.value("rejected", Json()), cp + ".rejected", errors);
      st.categories.push_back(std::move(snap));
    }
    log.steps.push_back(std::move(st));
  }
  log.final_held = Matching(
      contracts_from_json(instance, j.value("final_held", Json::array()), "log.final_held", errors));
  if (errors.size() != before) return std::nullopt;
  return log;
}

}  // namespace detail

inline std::optional<LoadedOutcome> outcome_from_json(const Instance& instance, const Json& j,
                                                      std::vector<Issue>& errors) {
  const std::size_t before = errors.size();
  LoadedOutcome out;
  if (!j.is_object() || !j.contains("matching") || !j["matching"].is_array()) {
    errors.push_back({IssueCode::kParseError, "", "outcome needs a 'matching' array"});
    return std::nullopt;
  }
  if (j.value("schema_version", 0) != kSchemaVersion) {
    errors.push_back({IssueCode::kSchemaVersion, "schema_version",
                      "expected " + std::to_string(kSchemaVersion)});
  }
  if (j.contains("invocation") && j["invocation"].is_object()) {
    const auto& inv = j["invocation"];
    const std::string variant = inv.value("variant", std::string{"plain"});
    if (variant == "transfer") {
      out.variant = Variant::kTransfer;
    } else if (variant != "plain") {
      errors.push_back({IssueCode::kParseError, "invocation.variant", "unknown variant"});
    }
    if (inv.value("dereserved_pool", std::string{"any"}) == "open-only") {
      out.dereserved_pool = DereservedPool::kOpenContractsOnly;
    }
  }
  std::vector<Contract> contracts;
  for (std::size_t k = 0; k < j["matching"].size(); ++k) {
    const std::string path = detail::at("matching", k);
    const Json& m = j["matching"][k];
    if (!m.is_object()) {
      errors.push_back({IssueCode::kParseError, path, "expected an object"});
      continue;
    }
    const Json triple = Json::array({m.value("individual", Json()), m.value("institution", Json()),
                                     m.value("category", Json())});
    const auto c = detail::contract_from_json(instance, triple, path, errors);
    if (!c) continue;
    Category pool = c->category;
    if (m.contains("seat_pool")) {
      const auto parsed = m["seat_pool"].is_string()
                              ? parse_category(m["seat_pool"].get<std::string>())
                              : std::nullopt;
      if (!parsed) {
        errors.push_back({IssueCode::kUnknownCategory, path + ".seat_pool", "bad seat pool"});
        continue;
      }
      pool = *parsed;
    }
    contracts.push_back(*c);
    out.seats.push_back({*c, pool});
  }
  out.matching = Matching(contracts);
  std::sort(out.seats.begin(), out.seats.end());
  if (j.contains("log")) out.log = detail::log_from_json(instance, j["log"], errors);
  if (errors.size() != before) return std::nullopt;
  return out;
}

inline std::optional<LoadedOutcome> load_outcome(const std::string& path, const Instance& instance,
                                                 std::vector<Issue>& errors) {
  const auto text = read_file(path, errors);
  if (!text) return std::nullopt;
  const auto json = parse_json(*text, errors, path);
  if (!json) return std::nullopt;
  return outcome_from_json(instance, *json, errors);
}

}  // namespace hres
