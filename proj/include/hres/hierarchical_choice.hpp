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

// Within-category hierarchical choice under one-to-all horizontal counting.
//
// Types are visited leaf level first. Each type takes its best remaining
// members up to its (updated) quota; every admit is charged against all of
// the type's ancestors. Whatever capacity is left after the last level goes
// to the best remaining applicants by merit alone.

#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "hres/hierarchy.hpp"
#include "hres/types.hpp"

namespace hres {

/// One applicant in a category pool. `rank` is the merit position at the
/// institution (lower is better) and must be distinct within a pool.
struct Applicant {
  PersonIndex person;
  std::uint32_t rank = 0;
  TypeSet types;

  bool operator==(const Applicant&) const = default;
};

struct TypeStep {
  TypeIndex type;
  /// Remaining quota when the type came up.
  int quota = 0;
  /// min(quota, remaining capacity).
  int effective_quota = 0;
  /// The capacity clamp cut selection short for this type.
  bool clamp_bound = false;
  /// Unchosen members of the type, best first.
  std::vector<PersonIndex> considered;
  std::vector<PersonIndex> selected;
  int capacity_after = 0;
};

struct LevelStep {
  std::vector<TypeIndex> level;
  std::vector<TypeStep> types;
  /// Quota vector after this level; entries of processed types are zeroed.
  std::vector<int> quotas_after;
};

struct ChoiceTrace {
  int initial_capacity = 0;
  std::vector<LevelStep> levels;
  std::vector<PersonIndex> merit_phase;
  int capacity_remaining = 0;
  /// Capacity ran out while some type still had unmet quota and members.
  bool exhausted_before_quotas = false;

  bool empty() const { return levels.empty() && merit_phase.empty(); }
};

struct HierarchicalChoice {
  /// In selection order.
  std::vector<PersonIndex> chosen;
  ChoiceTrace trace;
};

namespace detail {

inline void check_choice_inputs(std::span<const Applicant> pool, std::span<const int> quotas,
                                const HierarchyForest& forest) {
  if (quotas.size() != forest.size()) {
    throw Error(IssueCode::kQuotaIndexMismatch,
                "quota vector has " + std::to_string(quotas.size()) + " entries, forest has " +
                    std::to_string(forest.size()) + " types");
  }
  const std::uint64_t allowed =
      forest.size() >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << forest.size()) - 1;
  for (const auto& a : pool) {
    if ((a.types.bits() & ~allowed) != 0) {
      throw Error(IssueCode::kQuotaIndexMismatch,
                  "applicant " + std::to_string(a.person.value) + " has a type outside the forest");
    }
  }
}

/// Pool positions sorted best first.
inline std::vector<std::size_t> merit_order(std::span<const Applicant> pool) {
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pool[a].rank < pool[b].rank; });
  return order;
}

}  // namespace detail

inline HierarchicalChoice choose_hierarchical(std::span<const Applicant> pool,
                                              std::span<const int> quotas, int capacity,
                                              const HierarchyForest& forest) {
  detail::check_choice_inputs(pool, quotas, forest);
  HierarchicalChoice result;
  if (pool.empty()) return result;

  auto& trace = result.trace;
  int seats = std::max(capacity, 0);
  trace.initial_capacity = seats;

  const auto order = detail::merit_order(pool);
  std::vector<bool> taken(pool.size(), false);
  std::vector<int> remaining(quotas.begin(), quotas.end());
  for (int& q : remaining) q = std::max(q, 0);

  for (const auto& level : forest.levels()) {
    if (seats == 0 || result.chosen.size() == pool.size()) break;
    LevelStep step;
    step.level = level;
    for (TypeIndex t : level) {
      TypeStep ts;
      ts.type = t;
      ts.quota = remaining[t.value];
      ts.effective_quota = std::min(ts.quota, seats);
      for (std::size_t idx : order) {
        if (taken[idx] || !pool[idx].types.contains(t)) continue;
        ts.considered.push_back(pool[idx].person);
        if (static_cast<int>(ts.selected.size()) < ts.effective_quota) {
          ts.selected.push_back(pool[idx].person);
          taken[idx] = true;
          result.chosen.push_back(pool[idx].person);
        }
      }
      const int n = static_cast<int>(ts.selected.size());
      ts.clamp_bound = ts.quota > seats && static_cast<int>(ts.considered.size()) > seats;
      if (ts.clamp_bound) trace.exhausted_before_quotas = true;
      seats -= n;
      for (TypeIndex a : forest.ancestors(t)) {
        remaining[a.value] = std::max(0, remaining[a.value] - n);
      }
      remaining[t.value] = 0;
      ts.capacity_after = seats;
      step.types.push_back(std::move(ts));
      if (seats == 0) break;
    }
    step.quotas_after = remaining;
    trace.levels.push_back(std::move(step));
  }

  // Types never reached still hold their quota.
  for (std::size_t t = 0; t < remaining.size() && seats == 0; ++t) {
    if (remaining[t] == 0) continue;
    for (std::size_t idx = 0; idx < pool.size(); ++idx) {
      if (!taken[idx] && pool[idx].types.contains(type(t))) trace.exhausted_before_quotas = true;
    }
  }

  for (std::size_t idx : order) {
    if (seats == 0) break;
    if (taken[idx]) continue;
    taken[idx] = true;
    --seats;
    result.chosen.push_back(pool[idx].person);
    trace.merit_phase.push_back(pool[idx].person);
  }
  trace.capacity_remaining = seats;
  return result;
}

/// Size of the chosen set the rule must return: min(|pool|, capacity).
inline std::size_t acceptant_size(std::size_t pool_size, int capacity) {
  return std::min(pool_size, static_cast<std::size_t>(std::max(capacity, 0)));
}

}  // namespace hres
