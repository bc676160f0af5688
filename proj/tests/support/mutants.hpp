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

// Deliberately wrong rules and mechanisms. The oracles must catch each one.

#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "hres/hres.hpp"

namespace hres::testing {

namespace detail {

enum class PeelOrder { kLeavesFirst, kRootsFirst };
enum class Pick { kBest, kWorst };

/// Generic peeling skeleton with knobs for level order and which members
/// fill a quota.
inline std::vector<PersonIndex> peel(const ChoiceProblem& p, std::span<const Applicant> pool,
                                     int capacity, PeelOrder order, Pick pick,
                                     bool overfill_leaves = false) {
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return pool[a].rank < pool[b].rank; });
  std::vector<bool> taken(pool.size(), false);
  std::vector<int> remaining = p.quotas;
  std::vector<PersonIndex> out;
  int seats = std::max(capacity, 0);
  auto levels = p.forest.levels();
  if (order == PeelOrder::kRootsFirst) std::reverse(levels.begin(), levels.end());
  for (const auto& level : levels) {
    for (TypeIndex t : level) {
      std::vector<std::size_t> members;
      for (std::size_t i : idx) {
        if (!taken[i] && pool[i].types.contains(t)) members.push_back(i);
      }
      if (pick == Pick::kWorst) std::reverse(members.begin(), members.end());
      int want = std::min(remaining[t.value], seats);
      const bool leaf = p.forest.children(t).empty();
      if (overfill_leaves && leaf && remaining[t.value] > 0 &&
          static_cast<int>(members.size()) > remaining[t.value] + 1) {
        want = std::min(remaining[t.value] + 1, seats);
      }
      int n = 0;
      for (std::size_t i : members) {
        if (n >= want) break;
        taken[i] = true;
        out.push_back(pool[i].person);
        ++n;
      }
      seats -= n;
      for (TypeIndex a : p.forest.ancestors(t)) {
        remaining[a.value] = std::max(0, remaining[a.value] - n);
      }
      remaining[t.value] = 0;
    }
  }
  for (std::size_t i : idx) {
    if (seats == 0) break;
    if (taken[i]) continue;
    taken[i] = true;
    out.push_back(pool[i].person);
    --seats;
  }
  return out;
}

}  // namespace detail

/// Top `capacity` by merit; quotas ignored.
inline ChoiceRule merit_first_rule() {
  return [](const ChoiceProblem&, std::span<const Applicant> pool, int capacity) {
    std::vector<Applicant> sorted(pool.begin(), pool.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const Applicant& a, const Applicant& b) { return a.rank < b.rank; });
    std::vector<PersonIndex> out;
    for (std::size_t k = 0; k < sorted.size() && static_cast<int>(k) < capacity; ++k) {
      out.push_back(sorted[k].person);
    }
    return out;
  };
}

/// Peels from the roots down instead of from the leaves up.
inline ChoiceRule reversed_peel_rule() {
  return [](const ChoiceProblem& p, std::span<const Applicant> pool, int capacity) {
    return detail::peel(p, pool, capacity, detail::PeelOrder::kRootsFirst, detail::Pick::kBest);
  };
}

/// Fills each quota with the lowest-ranked members of the type.
inline ChoiceRule quota_greedy_lowest_rule() {
  return [](const ChoiceProblem& p, std::span<const Applicant> pool, int capacity) {
    return detail::peel(p, pool, capacity, detail::PeelOrder::kLeavesFirst, detail::Pick::kWorst);
  };
}

/// Takes one extra member for a leaf quota once it is oversubscribed by
/// more than one applicant.
inline ChoiceRule overfill_leaf_rule() {
  return [](const ChoiceProblem& p, std::span<const Applicant> pool, int capacity) {
    return detail::peel(p, pool, capacity, detail::PeelOrder::kLeavesFirst, detail::Pick::kBest,
                        true);
  };
}

/// Reference peeling with the correct knobs; must agree with the engine.
inline ChoiceRule reference_peel_rule() {
  return [](const ChoiceProblem& p, std::span<const Applicant> pool, int capacity) {
    return detail::peel(p, pool, capacity, detail::PeelOrder::kLeavesFirst, detail::Pick::kBest);
  };
}

/// Aggregate rule whose categories rank applicants in reverse merit order.
inline InstitutionRule scrambled_precedence_rule(const Instance& instance, InstitutionIndex s,
                                                 Variant variant) {
  auto config = make_aggregate_config(instance, s, variant);
  const auto& rank = instance.institution(s).rank;
  config.rank_override.resize(rank.size());
  for (std::size_t p = 0; p < rank.size(); ++p) {
    config.rank_override[p] = static_cast<std::uint32_t>(rank.size() - 1 - rank[p]);
  }
  return InstitutionRule(instance, s, std::move(config));
}

/// Immediate acceptance: in round r every unassigned individual applies to
/// the r-th entry of their list; institutions accept permanently from that
/// round's applicants with whatever category seats remain.
inline Matching immediate_acceptance(const Instance& instance, const Profile& profile) {
  const std::size_t n = instance.individual_count();
  std::vector<bool> placed(n, false);
  std::vector<std::vector<Contract>> accepted(instance.institution_count());
  std::size_t rounds = 0;
  for (const auto& list : profile) rounds = std::max(rounds, list.size());
  for (std::size_t r = 0; r < rounds; ++r) {
    std::vector<std::vector<Contract>> applications(instance.institution_count());
    for (std::size_t p = 0; p < n; ++p) {
      if (placed[p] || r >= profile[p].size()) continue;
      const Slot slot = profile[p][r];
      applications[slot.institution.value].push_back({person(p), slot.institution, slot.category});
    }
    for (std::size_t s = 0; s < instance.institution_count(); ++s) {
      if (applications[s].empty()) continue;
      auto config = make_aggregate_config(instance, institution(s), Variant::kPlain);
      for (const auto& c : accepted[s]) --config.capacity[slot_of(c.category)];
      std::sort(applications[s].begin(), applications[s].end());
      const InstitutionRule rule(instance, institution(s), std::move(config), &profile);
      for (const auto& c : rule(applications[s])) {
        accepted[s].push_back(c);
        placed[c.person.value] = true;
      }
    }
  }
  std::vector<Contract> all;
  for (const auto& a : accepted) all.insert(all.end(), a.begin(), a.end());
  return Matching(std::move(all));
}

}  // namespace hres::testing
