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

// Problem instance: individuals, institutions, vertical capacities,
// horizontal reservations, merit rankings and preferences over
// (institution, category) pairs.

#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hres/hierarchy.hpp"
#include "hres/score.hpp"
#include "hres/types.hpp"

namespace hres {

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Raw (unvalidated) description, string keyed as in the instance file.

struct RawPreference {
  std::string institution;
  std::string category;

  bool operator==(const RawPreference&) const = default;
};

struct RawIndividual {
  std::string id;
  std::string membership = "g";
  std::vector<std::string> horizontal_types;
  std::vector<RawPreference> preferences;

  bool operator==(const RawIndividual&) const = default;
};

struct RawInstitution {
  std::string id;
  long long total_capacity = 0;
  /// Reserved categories only; the open capacity is the residual.
  std::map<std::string, long long> vertical_capacities;
  /// category -> horizontal type -> quota.
  std::map<std::string, std::map<std::string, long long>> horizontal_reservations;
  /// individual -> decimal score text.
  std::map<std::string, std::string> merit_scores;

  bool operator==(const RawInstitution&) const = default;
};

struct RawInstance {
  int schema_version = kSchemaVersion;
  /// When true, equal scores are ordered by ascending individual id.
  bool tiebreak_by_id = false;
  std::vector<TypeDeclaration> horizontal_types;
  std::vector<RawInstitution> institutions;
  std::vector<RawIndividual> individuals;

  bool operator==(const RawInstance&) const = default;
};

// ---------------------------------------------------------------------------
// Validated model

struct Slot {
  InstitutionIndex institution;
  Category category;

  auto operator<=>(const Slot&) const = default;
};

/// Strictly ranked acceptable (institution, category) pairs; anything
/// missing is worse than the outside option.
using PreferenceList = std::vector<Slot>;
using Profile = std::vector<PreferenceList>;

struct Contract {
  PersonIndex person;
  InstitutionIndex institution;
  Category category;

  auto operator<=>(const Contract&) const = default;
  Slot slot() const { return {institution, category}; }
};

struct Individual {
  std::string id;
  Membership membership = Membership::kGeneral;
  TypeSet types;
  PreferenceList preferences;

  bool operator==(const Individual&) const = default;
};

struct Institution {
  std::string id;
  int total_capacity = 0;
  /// Indexed by slot_of(category); the open entry is the residual.
  CategoryArray<int> capacity{};
  /// Horizontal quota vectors, one per category, aligned with the forest.
  CategoryArray<std::vector<int>> quotas;
  /// Scores by person index.
  std::vector<Score> scores;
  /// Merit position by person index; 0 is the top of the ranking.
  std::vector<std::uint32_t> rank;
  /// Persons, best first.
  std::vector<PersonIndex> ranking;

  bool operator==(const Institution&) const = default;
};

struct ValidationOptions {
  /// Overrides RawInstance::tiebreak_by_id when set.
  std::optional<bool> tiebreak_by_id;
};

struct ValidationResult;
ValidationResult validate_instance(const RawInstance& raw, ValidationOptions options = {});

class Instance {
 public:
  Instance() = default;

  const HierarchyForest& forest() const { return forest_; }
  std::span<const Individual> individuals() const { return individuals_; }
  std::span<const Institution> institutions() const { return institutions_; }
  std::size_t individual_count() const { return individuals_.size(); }
  std::size_t institution_count() const { return institutions_.size(); }

  const Individual& individual(PersonIndex p) const {
    if (p.value >= individuals_.size()) {
      throw Error(IssueCode::kUnknownIndividual, "person index " + std::to_string(p.value));
    }
    return individuals_[p.value];
  }
  const Institution& institution(InstitutionIndex s) const {
    if (s.value >= institutions_.size()) {
      throw Error(IssueCode::kUnknownInstitution,
                  "institution index " + std::to_string(s.value));
    }
    return institutions_[s.value];
  }

  std::optional<PersonIndex> find_individual(std::string_view id) const {
    const auto it = person_by_id_.find(std::string{id});
    if (it == person_by_id_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<InstitutionIndex> find_institution(std::string_view id) const {
    const auto it = institution_by_id_.find(std::string{id});
    if (it == institution_by_id_.end()) return std::nullopt;
    return it->second;
  }

  /// Persons in ascending id order.
  std::span<const PersonIndex> id_order() const { return id_order_; }

  bool tiebreak_by_id() const { return tiebreak_by_id_; }

  Profile profile() const {
    Profile out;
    out.reserve(individuals_.size());
    for (const auto& i : individuals_) out.push_back(i.preferences);
    return out;
  }

  /// Copy with a different preference profile (same structure otherwise).
  Instance with_profile(const Profile& profile) const {
    Instance copy = *this;
    for (std::size_t i = 0; i < copy.individuals_.size(); ++i) {
      copy.individuals_[i].preferences = profile.at(i);
    }
    return copy;
  }

  bool operator==(const Instance& other) const {
    return forest_ == other.forest_ && individuals_ == other.individuals_ &&
           institutions_ == other.institutions_ && tiebreak_by_id_ == other.tiebreak_by_id_;
  }

  /// Reconstructs the string-keyed description this instance was built from.
  RawInstance to_raw() const {
    RawInstance raw;
    raw.tiebreak_by_id = tiebreak_by_id_;
    raw.horizontal_types = forest_.declarations();
    for (const auto& s : institutions_) {
      RawInstitution r;
      r.id = s.id;
      r.total_capacity = s.total_capacity;
      for (Category c : kVerticalCategories) {
        if (c == Category::kOpen) continue;
        if (s.capacity[slot_of(c)] != 0) {
          r.vertical_capacities[std::string{to_string(c)}] = s.capacity[slot_of(c)];
        }
      }
      for (Category c : kVerticalCategories) {
        const auto& q = s.quotas[slot_of(c)];
        for (std::size_t t = 0; t < q.size(); ++t) {
          if (q[t] != 0) {
            r.horizontal_reservations[std::string{to_string(c)}][forest_.id(type(t))] = q[t];
          }
        }
      }
      for (std::size_t p = 0; p < individuals_.size(); ++p) {
        r.merit_scores[individuals_[p].id] = s.scores[p].text();
      }
      raw.institutions.push_back(std::move(r));
    }
    for (const auto& i : individuals_) {
      RawIndividual r;
      r.id = i.id;
      r.membership = std::string{to_string(i.membership)};
      for (TypeIndex t : i.types.members()) r.horizontal_types.push_back(forest_.id(t));
      for (const auto& slot : i.preferences) {
        r.preferences.push_back({institutions_[slot.institution.value].id,
                                 std::string{to_string(slot.category)}});
      }
      raw.individuals.push_back(std::move(r));
    }
    return raw;
  }

 private:
  friend ValidationResult validate_instance(const RawInstance&, ValidationOptions);

  void index() {
    person_by_id_.clear();
    institution_by_id_.clear();
    for (std::size_t i = 0; i < individuals_.size(); ++i) {
      person_by_id_.emplace(individuals_[i].id, person(i));
    }
    for (std::size_t s = 0; s < institutions_.size(); ++s) {
      institution_by_id_.emplace(institutions_[s].id, hres::institution(s));
    }
    id_order_.clear();
    for (const auto& [id, p] : person_by_id_) id_order_.push_back(p);
  }

  HierarchyForest forest_;
  std::vector<Individual> individuals_;
  std::vector<Institution> institutions_;
  std::map<std::string, PersonIndex> person_by_id_;
  std::map<std::string, InstitutionIndex> institution_by_id_;
  std::vector<PersonIndex> id_order_;
  bool tiebreak_by_id_ = false;
};

struct ValidationResult {
  std::optional<Instance> instance;
  std::vector<Issue> errors;
  std::vector<Issue> warnings;
  /// Audit record of tie conversions.
  std::vector<Issue> notes;

  bool ok() const { return errors.empty(); }
};

// ---------------------------------------------------------------------------
// Quota feasibility

/// Seats needed to meet every quota of one category under one-to-all
/// counting: a type needs max(own quota, sum of its children's needs).
inline long long required_seats(const HierarchyForest& forest, std::span<const int> quotas) {
  std::vector<long long> need(forest.size(), 0);
  // Children come before parents when walking levels bottom-up.
  for (const auto& level : forest.levels()) {
    for (TypeIndex t : level) {
      long long below = 0;
      for (TypeIndex c : forest.children(t)) below += need[c.value];
      need[t.value] = std::max<long long>(quotas[t.value], below);
    }
  }
  long long total = 0;
  for (TypeIndex r : forest.roots()) total += need[r.value];
  return total;
}

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline std::string at(std::string_view base, std::size_t i) {
  return std::string{base} + "[" + std::to_string(i) + "]";
}

}  // namespace detail

inline ValidationResult validate_instance(const RawInstance& raw, ValidationOptions options) {
  ValidationResult result;
  auto& errors = result.errors;
  const bool tiebreak = options.tiebreak_by_id.value_or(raw.tiebreak_by_id);

  if (raw.schema_version != kSchemaVersion) {
    errors.push_back({IssueCode::kSchemaVersion, "schema_version",
                      "unsupported schema version " + std::to_string(raw.schema_version)});
  }

  std::vector<TypeMembership> memberships;
  memberships.reserve(raw.individuals.size());
  for (const auto& i : raw.individuals) memberships.push_back({i.id, i.horizontal_types});
  auto forest = build_forest(raw.horizontal_types, memberships);
  errors.insert(errors.end(), forest.errors.begin(), forest.errors.end());

  std::map<std::string, std::size_t> person_ids;
  for (std::size_t i = 0; i < raw.individuals.size(); ++i) {
    if (!person_ids.emplace(raw.individuals[i].id, i).second) {
      errors.push_back({IssueCode::kDuplicateId, detail::at("individuals", i),
                        "individual '" + raw.individuals[i].id + "' declared twice"});
    }
  }
  std::map<std::string, std::size_t> institution_ids;
  for (std::size_t s = 0; s < raw.institutions.size(); ++s) {
    if (!institution_ids.emplace(raw.institutions[s].id, s).second) {
      errors.push_back({IssueCode::kDuplicateId, detail::at("institutions", s),
                        "institution '" + raw.institutions[s].id + "' declared twice"});
    }
  }

  Instance instance;
  instance.tiebreak_by_id_ = tiebreak;
  const std::size_t type_count = forest.forest ? forest.forest->size() : 0;

  // Individuals.
  for (std::size_t i = 0; i < raw.individuals.size(); ++i) {
    const auto& r = raw.individuals[i];
    const std::string path = detail::at("individuals", i);
    Individual ind;
    ind.id = r.id;
    if (const auto m = parse_membership(r.membership)) {
      ind.membership = *m;
    } else {
      errors.push_back({IssueCode::kUnknownCategory, path + ".membership",
                        "unknown membership '" + r.membership + "'"});
    }
    if (forest.forest) ind.types = forest.member_types[i];

    std::set<Slot> seen;
    for (std::size_t k = 0; k < r.preferences.size(); ++k) {
      const auto& pref = r.preferences[k];
      const std::string ppath = path + ".preferences" + "[" + std::to_string(k) + "]";
      const auto s = institution_ids.find(pref.institution);
      const auto c = parse_category(pref.category);
      if (s == institution_ids.end()) {
        errors.push_back({IssueCode::kUnknownInstitution, ppath,
                          "unknown institution '" + pref.institution + "'"});
        continue;
      }
      if (!c) {
        errors.push_back({IssueCode::kUnknownCategory, ppath,
                          "unknown category '" + pref.category + "'"});
        continue;
      }
      if (!eligible(ind.membership, *c)) {
        errors.push_back({IssueCode::kIneligiblePreference, ppath,
                          "membership " + std::string{to_string(ind.membership)} +
                              " is not eligible for category " + std::string{to_string(*c)}});
        continue;
      }
      const Slot slot{institution(s->second), *c};
      if (!seen.insert(slot).second) {
        errors.push_back({IssueCode::kDuplicatePreference, ppath,
                          "pair (" + pref.institution + ", " + pref.category +
                              ") listed more than once"});
        continue;
      }
      ind.preferences.push_back(slot);
    }
    instance.individuals_.push_back(std::move(ind));
  }

  // Institutions.
  for (std::size_t s = 0; s < raw.institutions.size(); ++s) {
    const auto& r = raw.institutions[s];
    const std::string path = detail::at("institutions", s);
    Institution inst;
    inst.id = r.id;
    if (r.total_capacity < 0) {
      errors.push_back({IssueCode::kNegativeValue, path + ".total_capacity",
                        "total capacity must be nonnegative"});
    }
    inst.total_capacity = static_cast<int>(std::max(0LL, r.total_capacity));

    long long reserved = 0;
    for (const auto& [name, value] : r.vertical_capacities) {
      const auto c = parse_category(name);
      const std::string cpath = path + ".vertical_capacities." + name;
      if (!c || *c == Category::kDereserved || *c == Category::kOpen) {
        errors.push_back({IssueCode::kUnknownCategory, cpath,
                          c == Category::kOpen
                              ? "open capacity is the residual and cannot be declared"
                              : "'" + name + "' is not a reserved category"});
        continue;
      }
      if (value < 0) {
        errors.push_back({IssueCode::kNegativeValue, cpath, "capacity must be nonnegative"});
        continue;
      }
      inst.capacity[slot_of(*c)] = static_cast<int>(value);
      reserved += value;
    }
    if (reserved > r.total_capacity) {
      errors.push_back({IssueCode::kCapacityOverflow, path + ".vertical_capacities",
                        "reserved seats " + std::to_string(reserved) + " exceed total capacity " +
                            std::to_string(r.total_capacity)});
    } else {
      inst.capacity[slot_of(Category::kOpen)] = static_cast<int>(r.total_capacity - reserved);
    }

    for (auto& q : inst.quotas) q.assign(type_count, 0);
    for (const auto& [name, row] : r.horizontal_reservations) {
      const auto c = parse_category(name);
      const std::string cpath = path + ".horizontal_reservations." + name;
      if (!c || *c == Category::kDereserved) {
        errors.push_back({IssueCode::kUnknownCategory, cpath,
                          "'" + name + "' cannot carry horizontal reservations"});
        continue;
      }
      for (const auto& [type_id, value] : row) {
        const auto t = forest.forest ? forest.forest->find(type_id) : std::nullopt;
        if (!t) {
          if (forest.forest) {
            errors.push_back({IssueCode::kUnknownType, cpath + "." + type_id,
                              "horizontal type '" + type_id + "' is not declared"});
          }
          continue;
        }
        if (value < 0) {
          errors.push_back({IssueCode::kNegativeValue, cpath + "." + type_id,
                            "quota must be nonnegative"});
          continue;
        }
        inst.quotas[slot_of(*c)][t->value] = static_cast<int>(value);
      }
    }
    if (forest.forest) {
      for (Category c : kVerticalCategories) {
        const auto need = required_seats(*forest.forest, inst.quotas[slot_of(c)]);
        if (need > inst.capacity[slot_of(c)]) {
          result.warnings.push_back(
              {IssueCode::kQuotaExceedsCapacity,
               path + ".horizontal_reservations." + std::string{to_string(c)},
               "quotas need " + std::to_string(need) + " seats but category " +
                   std::string{to_string(c)} + " has " +
                   std::to_string(inst.capacity[slot_of(c)]) +
                   "; selection may stop before every type is considered"});
        }
      }
    }

    // Scores and the induced strict ranking.
    inst.scores.assign(raw.individuals.size(), Score{});
    std::vector<bool> scored(raw.individuals.size(), false);
    for (const auto& [pid, text] : r.merit_scores) {
      const auto p = person_ids.find(pid);
      const std::string spath = path + ".merit_scores." + pid;
      if (p == person_ids.end()) {
        errors.push_back({IssueCode::kUnknownIndividual, spath,
                          "score given for unknown individual '" + pid + "'"});
        continue;
      }
      const auto score = Score::parse(text);
      if (!score) {
        errors.push_back({IssueCode::kBadScore, spath, "malformed score '" + text + "'"});
        continue;
      }
      inst.scores[p->second] = *score;
      scored[p->second] = true;
    }
    bool complete = true;
    for (std::size_t p = 0; p < raw.individuals.size(); ++p) {
      if (!scored[p]) {
        complete = false;
        errors.push_back({IssueCode::kMissingScore, path + ".merit_scores",
                          "no score for individual '" + raw.individuals[p].id + "'"});
      }
    }
    if (complete) {
      std::vector<std::size_t> order(raw.individuals.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (inst.scores[a] != inst.scores[b]) return inst.scores[a] > inst.scores[b];
        return raw.individuals[a].id < raw.individuals[b].id;
      });
      for (std::size_t k = 1; k < order.size(); ++k) {
        const auto a = order[k - 1];
        const auto b = order[k];
        if (inst.scores[a] != inst.scores[b]) continue;
        Issue issue{IssueCode::kScoreTie, path + ".merit_scores",
                    "individuals '" + raw.individuals[a].id + "' and '" +
                        raw.individuals[b].id + "' share score " + inst.scores[a].text()};
        if (tiebreak) {
          issue.code = IssueCode::kTieBroken;
          issue.message += "; '" + raw.individuals[a].id + "' ranked first by id";
          result.notes.push_back(std::move(issue));
        } else {
          errors.push_back(std::move(issue));
        }
      }
      inst.rank.assign(order.size(), 0);
      for (std::size_t k = 0; k < order.size(); ++k) {
        inst.rank[order[k]] = static_cast<std::uint32_t>(k);
        inst.ranking.push_back(person(order[k]));
      }
    }
    instance.institutions_.push_back(std::move(inst));
  }

  if (!errors.empty()) return result;
  instance.forest_ = std::move(*forest.forest);
  instance.index();
  result.instance = std::move(instance);
  return result;
}

/// Validates and throws on the first error; for trusted, program-built input.
inline Instance make_instance(const RawInstance& raw, ValidationOptions options = {}) {
  auto result = validate_instance(raw, options);
  if (!result.ok()) {
    throw Error(result.errors.front().code, format_issue(result.errors.front()));
  }
  return std::move(*result.instance);
}

// ---------------------------------------------------------------------------
// Contract universe

enum class UniverseScope { kAll, kAcceptable };

/// X: open contracts at every institution for everyone, plus the reserved
/// contract for members of a reserved category. kAcceptable keeps only pairs
/// the individual actually ranks.
inline std::vector<Contract> build_contract_universe(const Instance& instance,
                                                     UniverseScope scope = UniverseScope::kAll) {
  std::vector<Contract> out;
  for (std::size_t p = 0; p < instance.individual_count(); ++p) {
    const auto& ind = instance.individuals()[p];
    if (scope == UniverseScope::kAcceptable) {
      for (const auto& slot : ind.preferences) {
        out.push_back({person(p), slot.institution, slot.category});
      }
      continue;
    }
    for (std::size_t s = 0; s < instance.institution_count(); ++s) {
      out.push_back({person(p), institution(s), Category::kOpen});
      if (const auto r = reserved_category(ind.membership)) {
        out.push_back({person(p), institution(s), *r});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Merit

enum class MeritOrder { kFirst, kSecond };

/// Which of a and b ranks higher at s. Identical persons are rejected since
/// the ranking is strict.
inline MeritOrder merit_compare(const Instance& instance, InstitutionIndex s, PersonIndex a,
                                PersonIndex b) {
  const auto& inst = instance.institution(s);
  if (a.value >= instance.individual_count() || b.value >= instance.individual_count()) {
    throw Error(IssueCode::kUnknownIndividual, "person index out of range");
  }
  if (a == b) {
    throw Error(IssueCode::kIdenticalIndividuals, "cannot rank an individual against itself");
  }
  return inst.rank[a.value] < inst.rank[b.value] ? MeritOrder::kFirst : MeritOrder::kSecond;
}

/// Position in the category-r ranking, or nullopt when the individual is
/// not eligible for category r (ranked below the outside option).
inline std::optional<std::uint32_t> category_rank(const Instance& instance, InstitutionIndex s,
                                                  Category c, PersonIndex p) {
  if (!eligible(instance.individual(p).membership, c)) return std::nullopt;
  return instance.institution(s).rank[p.value];
}

// ---------------------------------------------------------------------------
// Matchings

/// A set of contracts. Feasibility here is weak: at most one contract per
/// individual and total institution capacity; per-category compliance is an
/// audit in the oracles.
class Matching {
 public:
  Matching() = default;
  explicit Matching(std::vector<Contract> contracts) : contracts_(std::move(contracts)) {
    std::sort(contracts_.begin(), contracts_.end());
    contracts_.erase(std::unique(contracts_.begin(), contracts_.end()), contracts_.end());
  }

  std::span<const Contract> contracts() const { return contracts_; }
  std::size_t size() const { return contracts_.size(); }
  bool empty() const { return contracts_.empty(); }
  bool contains(const Contract& c) const {
    return std::binary_search(contracts_.begin(), contracts_.end(), c);
  }

  /// Y_i.
  std::vector<Contract> of_individual(PersonIndex p) const {
    std::vector<Contract> out;
    for (const auto& c : contracts_) {
      if (c.person == p) out.push_back(c);
    }
    return out;
  }
  /// Y_s.
  std::vector<Contract> at_institution(InstitutionIndex s) const {
    std::vector<Contract> out;
    for (const auto& c : contracts_) {
      if (c.institution == s) out.push_back(c);
    }
    return out;
  }

  /// Single-contract-per-individual view; nullopt for unmatched.
  std::vector<std::optional<Contract>> assignment(std::size_t individuals) const {
    std::vector<std::optional<Contract>> out(individuals);
    for (const auto& c : contracts_) out.at(c.person.value) = c;
    return out;
  }

  /// |Y_i| <= 1 for all i and |Y_s| <= total capacity for all s.
  bool weakly_feasible(const Instance& instance) const {
    std::vector<int> per_person(instance.individual_count(), 0);
    std::vector<int> per_institution(instance.institution_count(), 0);
    for (const auto& c : contracts_) {
      if (++per_person.at(c.person.value) > 1) return false;
      if (++per_institution.at(c.institution.value) >
          instance.institution(c.institution).total_capacity) {
        return false;
      }
    }
    return true;
  }

  bool operator==(const Matching&) const = default;

 private:
  std::vector<Contract> contracts_;
};

/// Position of `slot` in `list`, or nullopt when unacceptable.
inline std::optional<std::size_t> preference_position(const PreferenceList& list, Slot slot) {
  const auto it = std::find(list.begin(), list.end(), slot);
  if (it == list.end()) return std::nullopt;
  return static_cast<std::size_t>(it - list.begin());
}

/// True iff `candidate` is strictly better than `current` under `list`;
/// an absent current assignment is the outside option.
inline bool strictly_prefers(const PreferenceList& list, Slot candidate,
                             const std::optional<Slot>& current) {
  const auto cand = preference_position(list, candidate);
  if (!cand) return false;
  if (!current) return true;
  const auto cur = preference_position(list, *current);
  return !cur || *cand < *cur;
}

}  // namespace hres
