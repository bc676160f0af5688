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

// Brute-force reference checks. Nothing here calls the hierarchical rule;
// every oracle works from the definitions directly so that it can certify
// (or refute) the engine.

#pragma once

#include <algorithm>
#include <bit>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hres/aggregate_choice.hpp"
#include "hres/cop.hpp"
#include "hres/generate.hpp"
#include "hres/hierarchy.hpp"
#include "hres/instance.hpp"

namespace hres {

struct Counterexample {
  std::string kind;
  std::string detail;
  std::vector<Contract> contracts;
  std::vector<PersonIndex> individuals;
};

struct AuditReport {
  std::string property;
  std::size_t checked = 0;
  std::vector<Counterexample> counterexamples;

  bool passed() const { return counterexamples.empty(); }

  void absorb(AuditReport other) {
    checked += other.checked;
    for (auto& c : other.counterexamples) counterexamples.push_back(std::move(c));
  }
};

// ---------------------------------------------------------------------------
// Merit domination

struct DominationWitness {
  /// (k-th best of the dominating set, k-th best of the other set).
  std::vector<std::pair<PersonIndex, PersonIndex>> pairing;
  /// First position where the dominating set is strictly better.
  std::size_t strict_position = 0;
};

struct DominationVerdict {
  bool dominates = false;
  std::optional<DominationWitness> witness;
};

/// Does `a` merit-dominate `b`? `rank[p]` is p's merit position (lower is
/// better). Both sets must have the same size.
inline DominationVerdict merit_dominates(std::span<const PersonIndex> a,
                                         std::span<const PersonIndex> b,
                                         std::span<const std::uint32_t> rank) {
  if (a.size() != b.size()) {
    throw Error(IssueCode::kSizeMismatch, "merit domination compares sets of equal size, got " +
                                              std::to_string(a.size()) + " and " +
                                              std::to_string(b.size()));
  }
  auto by_rank = [&](PersonIndex x, PersonIndex y) { return rank[x.value] < rank[y.value]; };
  std::vector<PersonIndex> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end(), by_rank);
  std::sort(sb.begin(), sb.end(), by_rank);
  std::optional<std::size_t> strict;
  for (std::size_t k = 0; k < sa.size(); ++k) {
    if (rank[sa[k].value] > rank[sb[k].value]) return {};
    if (rank[sa[k].value] < rank[sb[k].value] && !strict) strict = k;
  }
  if (!strict) return {};
  DominationWitness w;
  for (std::size_t k = 0; k < sa.size(); ++k) w.pairing.emplace_back(sa[k], sb[k]);
  w.strict_position = *strict;
  return {true, std::move(w)};
}

inline DominationVerdict merit_dominates(const Instance& instance, InstitutionIndex s,
                                         std::span<const PersonIndex> a,
                                         std::span<const PersonIndex> b) {
  return merit_dominates(a, b, instance.institution(s).rank);
}

// ---------------------------------------------------------------------------
// Reservation shortfall

/// Sum over types of unmet quota units for a chosen set (one-to-all).
inline int shortfall(std::span<const TypeSet> chosen_types, std::span<const int> quotas) {
  int total = 0;
  for (std::size_t t = 0; t < quotas.size(); ++t) {
    int count = 0;
    for (TypeSet s : chosen_types) count += s.contains(type(t)) ? 1 : 0;
    total += std::max(0, quotas[t] - count);
  }
  return total;
}

inline constexpr std::size_t kExhaustivePoolLimit = 12;
inline constexpr std::size_t kEnumerationPoolLimit = 22;

namespace detail {

inline void check_shortfall_inputs(std::size_t pool, std::span<const int> quotas,
                                   std::size_t size, const HierarchyForest& forest) {
  if (size > pool) {
    throw Error(IssueCode::kSizeTooLarge, "subset size " + std::to_string(size) +
                                              " exceeds pool of " + std::to_string(pool));
  }
  if (quotas.size() != forest.size()) {
    throw Error(IssueCode::kQuotaIndexMismatch, "quota vector does not match the forest");
  }
}

/// Calls f(mask) for every size-k subset of an n-element set.
template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
  if (k > n) return;
  if (k == 0) {
    f(std::uint32_t{0});
    return;
  }
  std::uint32_t mask = (std::uint32_t{1} << k) - 1;
  const std::uint32_t end = std::uint32_t{1} << n;
  while (mask < end) {
    f(mask);
    const std::uint32_t c = mask & (~mask + 1);
    const std::uint32_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
}

inline int mask_shortfall(std::span<const Applicant> pool, std::span<const int> quotas,
                          std::uint32_t mask) {
  std::vector<TypeSet> types;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if ((mask >> i) & 1u) types.push_back(pool[i].types);
  }
  return shortfall(types, quotas);
}

}  // namespace detail

/// Minimum shortfall over all size-`size` subsets, by enumeration.
inline int min_shortfall_exhaustive(std::span<const Applicant> pool, std::span<const int> quotas,
                                    std::size_t size, const HierarchyForest& forest) {
  detail::check_shortfall_inputs(pool.size(), quotas, size, forest);
  if (pool.size() > kEnumerationPoolLimit) {
    throw Error(IssueCode::kSizeTooLarge, "pool too large to enumerate");
  }
  int best = std::numeric_limits<int>::max();
  detail::for_each_subset(pool.size(), size, [&](std::uint32_t mask) {
    best = std::min(best, detail::mask_shortfall(pool, quotas, mask));
  });
  return best;
}

/// Exact minimum shortfall for laminar types via a tree knapsack: members
/// are grouped by their deepest type, and each type's subtree is solved for
/// every number of selected members.
inline int min_shortfall_laminar(std::span<const Applicant> pool, std::span<const int> quotas,
                                 std::size_t size, const HierarchyForest& forest) {
  detail::check_shortfall_inputs(pool.size(), quotas, size, forest);
  constexpr int kInf = std::numeric_limits<int>::max() / 4;
  const std::size_t n = forest.size();
  std::vector<int> members(n, 0);
  int untyped = 0;
  for (const auto& a : pool) {
    if (a.types.empty()) {
      ++untyped;
      continue;
    }
    if (!forest.is_root_path(a.types)) {
      throw Error(IssueCode::kHierarchyViolation, "applicant type set is not a root path");
    }
    const auto ts = a.types.members();
    const TypeIndex deepest = *std::max_element(
        ts.begin(), ts.end(),
        [&](TypeIndex x, TypeIndex y) { return forest.depth(x) < forest.depth(y); });
    ++members[deepest.value];
  }

  auto combine = [&](const std::vector<int>& f, const std::vector<int>& g) {
    std::vector<int> h(f.size() + g.size() - 1, kInf);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f[i] >= kInf) continue;
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (g[j] < kInf) h[i + j] = std::min(h[i + j], f[i] + g[j]);
      }
    }
    return h;
  };

  // Own members contribute zero cost for any count up to their number.
  std::vector<std::vector<int>> table(n);
  for (const auto& level : forest.levels()) {
    for (TypeIndex t : level) {
      std::vector<int> f(static_cast<std::size_t>(members[t.value]) + 1, 0);
      for (TypeIndex c : forest.children(t)) f = combine(f, table[c.value]);
      for (std::size_t j = 0; j < f.size(); ++j) {
        if (f[j] < kInf) f[j] += std::max(0, quotas[t.value] - static_cast<int>(j));
      }
      table[t.value] = std::move(f);
    }
  }
  std::vector<int> total(static_cast<std::size_t>(untyped) + 1, 0);
  for (TypeIndex r : forest.roots()) total = combine(total, table[r.value]);
  return total.at(size);
}

/// Enumeration for small pools, the tree knapsack otherwise.
inline int min_shortfall(std::span<const Applicant> pool, std::span<const int> quotas,
                         std::size_t size, const HierarchyForest& forest) {
  if (pool.size() <= kExhaustivePoolLimit) {
    return min_shortfall_exhaustive(pool, quotas, size, forest);
  }
  return min_shortfall_laminar(pool, quotas, size, forest);
}

/// Passes iff no same-size subset of the pool with minimum shortfall
/// merit-dominates `chosen`. The reported witness is the best dominating
/// subset (lexicographically smallest sorted ranks).
inline AuditReport assert_merit_undominated(std::span<const Applicant> pool,
                                            std::span<const int> quotas, int capacity,
                                            const HierarchyForest& forest,
                                            std::span<const PersonIndex> chosen) {
  AuditReport report{"merit_undominated", 1, {}};
  const std::size_t size = acceptant_size(pool.size(), capacity);
  if (chosen.size() != size) {
    report.counterexamples.push_back(
        {"size", "chosen " + std::to_string(chosen.size()) + ", expected " + std::to_string(size),
         {}, {chosen.begin(), chosen.end()}});
    return report;
  }
  if (pool.size() > kEnumerationPoolLimit) {
    throw Error(IssueCode::kInstanceTooLargeForExhaustive, "pool too large to enumerate");
  }
  const int target = min_shortfall(pool, quotas, size, forest);

  std::vector<std::uint32_t> chosen_ranks;
  for (PersonIndex p : chosen) {
    const auto it = std::find_if(pool.begin(), pool.end(),
                                 [&](const Applicant& a) { return a.person == p; });
    if (it == pool.end()) {
      report.counterexamples.push_back({"foreign", "chosen individual not in pool", {}, {p}});
      return report;
    }
    chosen_ranks.push_back(it->rank);
  }
  std::sort(chosen_ranks.begin(), chosen_ranks.end());

  std::optional<std::vector<std::uint32_t>> best_ranks;
  std::uint32_t best_mask = 0;
  detail::for_each_subset(pool.size(), size, [&](std::uint32_t mask) {
    if (detail::mask_shortfall(pool, quotas, mask) != target) return;
    std::vector<std::uint32_t> ranks;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if ((mask >> i) & 1u) ranks.push_back(pool[i].rank);
    }
    std::sort(ranks.begin(), ranks.end());
    bool strict = false;
    for (std::size_t k = 0; k < ranks.size(); ++k) {
      if (ranks[k] > chosen_ranks[k]) return;
      strict = strict || ranks[k] < chosen_ranks[k];
    }
    if (strict && (!best_ranks || ranks < *best_ranks)) {
      best_ranks = std::move(ranks);
      best_mask = mask;
    }
  });
  if (best_ranks) {
    Counterexample c{"dominated", "a subset with minimum shortfall " + std::to_string(target) +
                                      " merit-dominates the chosen set",
                     {}, {}};
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if ((best_mask >> i) & 1u) idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t x, std::size_t y) { return pool[x].rank < pool[y].rank; });
    for (std::size_t i : idx) c.individuals.push_back(pool[i].person);
    report.counterexamples.push_back(std::move(c));
  }
  return report;
}

/// Passes iff `chosen` attains the minimum shortfall.
inline AuditReport assert_min_shortfall(std::span<const Applicant> pool,
                                        std::span<const int> quotas, int capacity,
                                        const HierarchyForest& forest,
                                        std::span<const PersonIndex> chosen) {
  AuditReport report{"min_shortfall", 1, {}};
  const std::size_t size = acceptant_size(pool.size(), capacity);
  std::vector<TypeSet> types;
  for (PersonIndex p : chosen) {
    const auto it = std::find_if(pool.begin(), pool.end(),
                                 [&](const Applicant& a) { return a.person == p; });
    if (it != pool.end()) types.push_back(it->types);
  }
  const int got = shortfall(types, quotas);
  const int best = min_shortfall(pool, quotas, std::min(size, chosen.size()), forest);
  if (got != best) {
    report.counterexamples.push_back({"shortfall",
                                      "chosen shortfall " + std::to_string(got) +
                                          ", minimum " + std::to_string(best),
                                      {}, {chosen.begin(), chosen.end()}});
  }
  return report;
}

// ---------------------------------------------------------------------------
// Fairness, envy, stability

inline std::string describe(const Instance& instance, const Contract& c) {
  return "(" + instance.individual(c.person).id + "," + instance.institution(c.institution).id +
         "," + std::string{to_string(c.category)} + ")";
}

/// Every individual with no chosen contract, against every chosen contract,
/// must be explained by higher merit, a different category, or a type the
/// chosen individual has and the rejected one lacks.
inline AuditReport check_fairness(const Instance& instance, InstitutionIndex s,
                                  std::span<const Contract> offers,
                                  std::span<const Contract> chosen) {
  AuditReport report{"fairness", 0, {}};
  const auto& rank = instance.institution(s).rank;
  std::vector<bool> picked(instance.individual_count(), false);
  for (const auto& y : chosen) picked[y.person.value] = true;
  for (const auto& x : offers) {
    if (picked[x.person.value]) continue;
    const TypeSet tx = instance.individual(x.person).types;
    for (const auto& y : chosen) {
      ++report.checked;
      if (rank[y.person.value] < rank[x.person.value]) continue;
      if (x.category != y.category) continue;
      if (!instance.individual(y.person).types.minus(tx).empty()) continue;
      report.counterexamples.push_back(
          {"unfair_rejection",
           describe(instance, x) + " rejected while " + describe(instance, y) +
               " chosen: lower merit, same category, no extra horizontal type",
           {x, y},
           {x.person, y.person}});
    }
  }
  return report;
}

/// For each j and each contract x held by someone else that j prefers to
/// their own assignment: i(x) outranks j at s(x), or j lacks a type of i(x).
inline AuditReport check_justified_envy(const Instance& instance, const Matching& matching) {
  AuditReport report{"justified_envy", 0, {}};
  const auto assignment = matching.assignment(instance.individual_count());
  for (std::size_t j = 0; j < instance.individual_count(); ++j) {
    const auto& ind = instance.individuals()[j];
    std::optional<Slot> own;
    if (assignment[j]) own = assignment[j]->slot();
    for (const auto& x : matching.contracts()) {
      if (x.person.value == j) continue;
      ++report.checked;
      if (!strictly_prefers(ind.preferences, x.slot(), own)) continue;
      const auto& rank = instance.institution(x.institution).rank;
      if (rank[x.person.value] < rank[j]) continue;
      if (!ind.types.is_superset_of(instance.individual(x.person).types)) continue;
      report.counterexamples.push_back(
          {"justified_envy",
           ind.id + " envies " + describe(instance, x) + " with higher merit and all its types",
           {x},
           {person(j), x.person}});
    }
  }
  return report;
}

enum class BlockingSearch : std::uint8_t {
  /// Exhaustive up to the size cap when the instance has at most
  /// kExhaustiveStabilityIndividuals individuals, singletons otherwise.
  kAuto,
  kSingletons,
  kExhaustive,
};

inline constexpr std::size_t kExhaustiveStabilityIndividuals = 6;

struct StabilityOptions {
  BlockingSearch search = BlockingSearch::kAuto;
  std::size_t max_block_size = 3;
};

/// Individual rationality, C_s(Y) = Y_s, and no blocking set Z with at most
/// one contract per individual, each preferred to the current assignment
/// and all chosen by their institutions from Y_s plus Z_s.
inline AuditReport check_stability(const Instance& instance, const Matching& matching,
                                   const std::vector<InstitutionRule>& rules,
                                   const StabilityOptions& options = {}) {
  AuditReport report{"stability", 0, {}};
  const std::size_t n = instance.individual_count();
  bool exhaustive = false;
  switch (options.search) {
    case BlockingSearch::kAuto:
      exhaustive = n <= kExhaustiveStabilityIndividuals;
      break;
    case BlockingSearch::kSingletons:
      break;
    case BlockingSearch::kExhaustive:
      if (n > kExhaustiveStabilityIndividuals) {
        throw Error(IssueCode::kInstanceTooLargeForExhaustive,
                    std::to_string(n) + " individuals; exhaustive blocking search supports " +
                        std::to_string(kExhaustiveStabilityIndividuals));
      }
      exhaustive = true;
      break;
  }

  if (!matching.weakly_feasible(instance)) {
    report.counterexamples.push_back({"infeasible", "matching is not weakly feasible",
                                      {matching.contracts().begin(), matching.contracts().end()},
                                      {}});
    return report;
  }
  const auto assignment = matching.assignment(n);
  for (const auto& c : matching.contracts()) {
    ++report.checked;
    if (!preference_position(instance.individual(c.person).preferences, c.slot())) {
      report.counterexamples.push_back(
          {"individual_rationality", describe(instance, c) + " is unacceptable to its holder",
           {c}, {c.person}});
    }
  }
  std::vector<std::vector<Contract>> held(instance.institution_count());
  for (const auto& c : matching.contracts()) held[c.institution.value].push_back(c);
  for (std::size_t s = 0; s < held.size(); ++s) {
    ++report.checked;
    const auto chosen = rules.at(s)(held[s]);
    if (chosen != held[s]) {
      report.counterexamples.push_back(
          {"choice_fixed_point",
           instance.institution(institution(s)).id + " would not choose its assigned set",
           held[s], {}});
    }
  }

  std::vector<Contract> candidates;
  for (std::size_t p = 0; p < n; ++p) {
    std::optional<Slot> own;
    if (assignment[p]) own = assignment[p]->slot();
    for (const auto& slot : instance.individuals()[p].preferences) {
      if (strictly_prefers(instance.individuals()[p].preferences, slot, own)) {
        candidates.push_back({person(p), slot.institution, slot.category});
      }
    }
  }

  auto blocks = [&](const std::vector<Contract>& z) {
    for (const auto& c : z) {
      auto pool = held[c.institution.value];
      for (const auto& d : z) {
        if (d.institution == c.institution) pool.push_back(d);
      }
      std::sort(pool.begin(), pool.end());
      const auto chosen = rules[c.institution.value](pool);
      if (!std::binary_search(chosen.begin(), chosen.end(), c)) return false;
    }
    return true;
  };
  auto record = [&](const std::vector<Contract>& z) {
    std::string text = "blocked via {";
    for (std::size_t k = 0; k < z.size(); ++k) text += (k ? "," : "") + describe(instance, z[k]);
    std::vector<PersonIndex> who;
    for (const auto& c : z) who.push_back(c.person);
    report.counterexamples.push_back({"blocking_set", text + "}", z, who});
  };

  const std::size_t max_size = exhaustive ? options.max_block_size : 1;
  std::vector<Contract> z;
  std::function<void(std::size_t)> extend = [&](std::size_t from) {
    for (std::size_t k = from; k < candidates.size(); ++k) {
      const auto& c = candidates[k];
      if (std::any_of(z.begin(), z.end(), [&](const Contract& d) { return d.person == c.person; })) {
        continue;
      }
      z.push_back(c);
      ++report.checked;
      if (blocks(z)) record(z);
      if (z.size() < max_size) extend(k + 1);
      z.pop_back();
    }
  };
  extend(0);
  return report;
}

inline AuditReport check_stability(const Instance& instance, const Matching& matching,
                                   Variant variant, const StabilityOptions& options = {}) {
  const Profile profile = instance.profile();
  const auto rules =
      make_rules(instance, profile, variant, DereservedPool::kAnyRemainingContract);
  return check_stability(instance, matching, rules, options);
}

/// Per-pool seat counts within capacity: each vertical category at most its
/// capacity, the de-reserved pool at most the OBC vacancies, each pool
/// label consistent with the contract it holds.
inline AuditReport check_seat_caps(const Instance& instance, std::span<const SeatAssignment> seats,
                                   Variant variant) {
  AuditReport report{"seat_caps", 0, {}};
  for (std::size_t s = 0; s < instance.institution_count(); ++s) {
    const auto& inst = instance.institutions()[s];
    CategoryArray<int> filled{};
    int dereserved = 0;
    for (const auto& a : seats) {
      if (a.contract.institution.value != s) continue;
      ++report.checked;
      if (a.seat_pool == Category::kDereserved) {
        if (variant != Variant::kTransfer) {
          report.counterexamples.push_back({"seat_pool", describe(instance, a.contract) +
                                                             " uses a de-reserved seat without transfer",
                                            {a.contract}, {a.contract.person}});
        }
        ++dereserved;
      } else if (a.seat_pool != a.contract.category) {
        report.counterexamples.push_back({"seat_pool", describe(instance, a.contract) +
                                                           " sits in a different category's seat",
                                          {a.contract}, {a.contract.person}});
      } else {
        ++filled[slot_of(a.seat_pool)];
      }
    }
    for (Category c : kVerticalCategories) {
      if (filled[slot_of(c)] > inst.capacity[slot_of(c)]) {
        report.counterexamples.push_back(
            {"category_cap", inst.id + " fills " + std::to_string(filled[slot_of(c)]) + " " +
                                 std::string{to_string(c)} + " seats of " +
                                 std::to_string(inst.capacity[slot_of(c)]),
             {}, {}});
      }
    }
    const int vacancies =
        std::max(0, inst.capacity[slot_of(Category::kOBC)] - filled[slot_of(Category::kOBC)]);
    if (dereserved > vacancies) {
      report.counterexamples.push_back(
          {"category_cap", inst.id + " fills " + std::to_string(dereserved) +
                               " de-reserved seats with " + std::to_string(vacancies) +
                               " OBC vacancies",
           {}, {}});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Choice-rule fuzzing

/// A within-category rule under test: chosen persons for `pool` at
/// `capacity`, with the problem's forest and quotas.
using ChoiceRule =
    std::function<std::vector<PersonIndex>(const ChoiceProblem&, std::span<const Applicant>, int)>;

inline ChoiceRule hierarchical_rule() {
  return [](const ChoiceProblem& p, std::span<const Applicant> pool, int capacity) {
    return choose_hierarchical(pool, p.quotas, capacity, p.forest).chosen;
  };
}

namespace detail {

inline std::string describe_problem(const ChoiceProblem& p, std::span<const Applicant> pool,
                                    int capacity) {
  std::ostringstream os;
  os << "capacity=" << capacity << " types=[";
  for (std::size_t t = 0; t < p.forest.size(); ++t) {
    os << (t ? " " : "") << p.forest.id(type(t));
    if (auto parent = p.forest.parent(type(t))) os << "<" << p.forest.id(*parent);
    os << ":" << p.quotas[t];
  }
  os << "] pool=[";
  for (std::size_t k = 0; k < pool.size(); ++k) {
    os << (k ? " " : "") << "p" << pool[k].person.value << "#" << pool[k].rank << "{";
    bool first = true;
    for (TypeIndex t : pool[k].types.members()) {
      os << (first ? "" : ",") << p.forest.id(t);
      first = false;
    }
    os << "}";
  }
  os << "]";
  return os.str();
}

inline std::vector<PersonIndex> sorted_people(std::vector<PersonIndex> v) {
  std::sort(v.begin(), v.end());
  return v;
}

inline bool has(const std::vector<PersonIndex>& v, PersonIndex p) {
  return std::find(v.begin(), v.end(), p) != v.end();
}

}  // namespace detail

struct FuzzOptions {
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  ChoiceSamplerParams sampler;
  /// Stop collecting after this many counterexamples.
  std::size_t max_counterexamples = 20;
};

/// Substitutes, size monotonicity, irrelevance of rejected contracts and
/// capacity monotonicity on random (A, i, j, q). Counterexamples are shrunk
/// by greedily dropping members of A while the failure persists.
inline AuditReport fuzz_choice_properties(const ChoiceRule& rule, const FuzzOptions& options) {
  AuditReport report{"choice_properties", 0, {}};
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    if (report.counterexamples.size() >= options.max_counterexamples) break;
    Rng rng = Rng::derive(options.seed, trial);
    const ChoiceProblem problem = sample_choice_problem(rng, options.sampler);
    if (problem.pool.size() < 2) {
      ++report.checked;
      continue;
    }
    std::vector<std::size_t> idx(problem.pool.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    rng.shuffle(idx);
    const Applicant ai = problem.pool[idx[0]];
    const Applicant aj = problem.pool[idx[1]];
    std::vector<Applicant> base;
    for (std::size_t k = 2; k < idx.size(); ++k) {
      if (rng.chance(2, 3)) base.push_back(problem.pool[idx[k]]);
    }
    const int q = problem.capacity;

    auto run = [&](std::vector<Applicant> pool, int cap) {
      return detail::sorted_people(rule(problem, pool, cap));
    };
    auto with = [](std::vector<Applicant> a, std::initializer_list<Applicant> extra) {
      a.insert(a.end(), extra);
      return a;
    };
    using Check = std::function<std::optional<std::string>(const std::vector<Applicant>&)>;
    const std::vector<std::pair<std::string, Check>> checks = {
        {"substitutes",
         [&](const std::vector<Applicant>& a) -> std::optional<std::string> {
           if (!detail::has(run(with(a, {ai}), q), ai.person) &&
               detail::has(run(with(a, {ai, aj}), q), ai.person)) {
             return "i rejected from A+i but chosen from A+i+j";
           }
           return std::nullopt;
         }},
        {"size_monotonicity",
         [&](const std::vector<Applicant>& a) -> std::optional<std::string> {
           if (run(a, q).size() > run(with(a, {ai}), q).size()) return "|C(A)| > |C(A+i)|";
           return std::nullopt;
         }},
        {"irc",
         [&](const std::vector<Applicant>& a) -> std::optional<std::string> {
           const auto bigger = run(with(a, {ai}), q);
           if (!detail::has(bigger, ai.person) && bigger != run(a, q)) {
             return "i rejected from A+i yet C(A) differs from C(A+i)";
           }
           return std::nullopt;
         }},
        {"quota_monotonicity",
         [&](const std::vector<Applicant>& a) -> std::optional<std::string> {
           const auto y = with(a, {ai, aj});
           const auto lo = run(y, q);
           const auto hi = run(y, q + 1);
           if (!std::includes(hi.begin(), hi.end(), lo.begin(), lo.end())) {
             return "C(Y,q) not contained in C(Y,q+1)";
           }
           if (hi.size() > lo.size() + 1) return "|C(Y,q+1)| - |C(Y,q)| > 1";
           return std::nullopt;
         }},
    };

    ++report.checked;
    for (const auto& [name, check] : checks) {
      auto failure = check(base);
      if (!failure) continue;
      auto shrunk = base;
      for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t k = 0; k < shrunk.size(); ++k) {
          auto smaller = shrunk;
          smaller.erase(smaller.begin() + static_cast<std::ptrdiff_t>(k));
          if (auto f = check(smaller)) {
            shrunk = std::move(smaller);
            failure = f;
            changed = true;
            break;
          }
        }
      }
      Counterexample c;
      c.kind = name;
      c.detail = *failure + "; trial " + std::to_string(trial) + "; i=p" +
                 std::to_string(ai.person.value) + " j=p" + std::to_string(aj.person.value) +
                 "; A: " + detail::describe_problem(problem, shrunk, q);
      for (const auto& a : shrunk) c.individuals.push_back(a.person);
      c.individuals.push_back(ai.person);
      c.individuals.push_back(aj.person);
      report.counterexamples.push_back(std::move(c));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Strategy-proofness

/// Reported profile to matching.
using Mechanism = std::function<Matching(const Instance&, const Profile&)>;

inline Mechanism cop_mechanism(Variant variant) {
  return [variant](const Instance& instance, const Profile& profile) {
    return run_cop(instance, profile, {variant, {}, false, {}}).matching;
  };
}

/// Institution-category pairs the individual is eligible for.
inline std::vector<Slot> eligible_pairs(const Instance& instance, PersonIndex p) {
  std::vector<Slot> out;
  const auto r = reserved_category(instance.individual(p).membership);
  for (std::size_t s = 0; s < instance.institution_count(); ++s) {
    out.push_back({institution(s), Category::kOpen});
    if (r) out.push_back({institution(s), *r});
  }
  return out;
}

/// Number of orderings of all subsets of an m-element set.
inline std::size_t list_space_size(std::size_t m) {
  std::size_t total = 0;
  std::size_t perms = 1;
  for (std::size_t k = 0; k <= m; ++k) {
    total += perms;
    perms *= (m - k);
  }
  return total;
}

/// Every ordering of every subset of `pairs`, empty list first.
inline std::vector<PreferenceList> enumerate_lists(std::span<const Slot> pairs) {
  std::vector<PreferenceList> out;
  PreferenceList current;
  std::vector<bool> used(pairs.size(), false);
  std::function<void()> go = [&] {
    out.push_back(current);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (used[k]) continue;
      used[k] = true;
      current.push_back(pairs[k]);
      go();
      current.pop_back();
      used[k] = false;
    }
  };
  go();
  return out;
}

namespace detail {

inline std::string describe_list(const Instance& instance, const PreferenceList& list) {
  std::string out = "[";
  for (std::size_t k = 0; k < list.size(); ++k) {
    out += (k ? " " : "") + instance.institution(list[k].institution).id + ":" +
           std::string{to_string(list[k].category)};
  }
  return out + "]";
}

inline std::string describe_slot(const Instance& instance, const std::optional<Slot>& slot) {
  if (!slot) return "unmatched";
  return instance.institution(slot->institution).id + ":" + std::string{to_string(slot->category)};
}

inline std::optional<Slot> slot_of_person(const Matching& m, PersonIndex p) {
  for (const auto& c : m.contracts()) {
    if (c.person == p) return c.slot();
  }
  return std::nullopt;
}

}  // namespace detail

/// For the instance's own (true) profile: every individual tries every list
/// over their eligible pairs; reports each strictly better outcome.
inline AuditReport probe_strategyproofness(const Instance& instance, const Mechanism& mechanism,
                                           std::size_t enumeration_cap = 100000) {
  AuditReport report{"strategyproofness", 0, {}};
  std::size_t total = 0;
  for (std::size_t p = 0; p < instance.individual_count(); ++p) {
    total += list_space_size(eligible_pairs(instance, person(p)).size());
    if (total > enumeration_cap) {
      throw Error(IssueCode::kEnumerationCapExceeded,
                  "misreport space exceeds cap of " + std::to_string(enumeration_cap));
    }
  }
  const Profile truth = instance.profile();
  const Matching honest = mechanism(instance, truth);
  for (std::size_t p = 0; p < instance.individual_count(); ++p) {
    const PersonIndex who = person(p);
    const auto own = detail::slot_of_person(honest, who);
    const auto pairs = eligible_pairs(instance, who);
    for (const auto& lie : enumerate_lists(pairs)) {
      if (lie == truth[p]) continue;
      ++report.checked;
      Profile reported = truth;
      reported[p] = lie;
      const auto got = detail::slot_of_person(mechanism(instance, reported), who);
      if (got && strictly_prefers(truth[p], *got, own)) {
        report.counterexamples.push_back(
            {"profitable_misreport",
             instance.individual(who).id + " reports " + detail::describe_list(instance, lie) +
                 " instead of " + detail::describe_list(instance, truth[p]) + " and gets " +
                 detail::describe_slot(instance, got) + " over " +
                 detail::describe_slot(instance, own),
             {},
             {who}});
      }
    }
  }
  return report;
}

/// Treats every profile in the product of list spaces as a true profile
/// and checks every unilateral deviation. Each profile is run once.
inline AuditReport probe_strategyproofness_all_profiles(const Instance& instance,
                                                        const Mechanism& mechanism,
                                                        std::size_t enumeration_cap = 2000000,
                                                        std::size_t max_counterexamples = 10) {
  AuditReport report{"strategyproofness_all_profiles", 0, {}};
  const std::size_t n = instance.individual_count();
  std::vector<std::vector<PreferenceList>> spaces;
  std::vector<std::vector<Slot>> pairs;
  std::size_t profiles = 1;
  for (std::size_t p = 0; p < n; ++p) {
    pairs.push_back(eligible_pairs(instance, person(p)));
    spaces.push_back(enumerate_lists(pairs.back()));
    profiles *= spaces.back().size();
    if (profiles > enumeration_cap) {
      throw Error(IssueCode::kEnumerationCapExceeded,
                  "profile space exceeds cap of " + std::to_string(enumeration_cap));
    }
  }
  // Outcome code per profile and person: index into that person's pairs,
  // or the pair count for unmatched.
  std::vector<std::uint8_t> cache(profiles * std::max<std::size_t>(n, 1));
  std::vector<std::size_t> digit(n, 0);
  Profile profile(n);
  for (std::size_t code = 0; code < profiles; ++code) {
    std::size_t rest = code;
    for (std::size_t p = 0; p < n; ++p) {
      digit[p] = rest % spaces[p].size();
      rest /= spaces[p].size();
      profile[p] = spaces[p][digit[p]];
    }
    const Matching m = mechanism(instance, profile);
    for (std::size_t p = 0; p < n; ++p) {
      const auto slot = detail::slot_of_person(m, person(p));
      std::size_t k = pairs[p].size();
      if (slot) k = static_cast<std::size_t>(
          std::find(pairs[p].begin(), pairs[p].end(), *slot) - pairs[p].begin());
      cache[code * n + p] = static_cast<std::uint8_t>(k);
    }
  }

  auto slot_at = [&](std::size_t code, std::size_t p) -> std::optional<Slot> {
    const std::size_t k = cache[code * n + p];
    if (k >= pairs[p].size()) return std::nullopt;
    return pairs[p][k];
  };
  for (std::size_t code = 0; code < profiles; ++code) {
    std::size_t stride = 1;
    std::size_t rest = code;
    for (std::size_t p = 0; p < n; ++p) {
      const std::size_t d = rest % spaces[p].size();
      rest /= spaces[p].size();
      const auto& truth = spaces[p][d];
      const auto own = slot_at(code, p);
      for (std::size_t alt = 0; alt < spaces[p].size(); ++alt) {
        if (alt == d) continue;
        ++report.checked;
        const std::size_t other = code - d * stride + alt * stride;
        const auto got = slot_at(other, p);
        if (got && strictly_prefers(truth, *got, own) &&
            report.counterexamples.size() < max_counterexamples) {
          report.counterexamples.push_back(
              {"profitable_misreport",
               "profile " + std::to_string(code) + ": " + instance.individual(person(p)).id +
                   " with true list " + detail::describe_list(instance, truth) + " reports " +
                   detail::describe_list(instance, spaces[p][alt]) + " and gets " +
                   detail::describe_slot(instance, got) + " over " +
                   detail::describe_slot(instance, own),
               {},
               {person(p)}});
        }
      }
      stride *= spaces[p].size();
    }
  }
  return report;
}

}  // namespace hres
