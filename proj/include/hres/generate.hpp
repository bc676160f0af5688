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

// Seeded random instances and within-category choice problems.

#pragma once

#include <array>
#include <numeric>
#include <string>
#include <vector>

#include "hres/hierarchical_choice.hpp"
#include "hres/instance.hpp"
#include "hres/random.hpp"

namespace hres {

struct GenParams {
  int individuals = 8;
  int institutions = 2;
  /// Percent of individuals in SC, ST, OBC, EWS; the rest are general.
  std::array<int, 4> category_percent{10, 10, 30, 10};
  int horizontal_types = 2;
  /// Longest root path in the generated forest.
  int max_depth = 2;
  /// Percent of individuals holding at least one horizontal type.
  int typed_percent = 40;
  int min_capacity = 1;
  int max_capacity = 4;
  /// Largest single horizontal quota.
  int max_quota = 1;
  /// Percent chance that a quota entry is drawn at all (otherwise 0).
  int quota_percent = 50;
  /// Preference lists take between this and all eligible pairs.
  int min_list_length = 0;
  /// Every institution ranks individuals the same way.
  bool common_ranking = false;
};

namespace detail {

inline std::string padded_id(char prefix, int i, int total) {
  const std::size_t width = std::to_string(std::max(total, 1)).size();
  std::string digits = std::to_string(i + 1);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

/// Draws a quota vector over the forest and trims it until its seat
/// requirement fits `capacity`.
inline std::vector<int> draw_feasible_quotas(Rng& rng, const HierarchyForest& forest,
                                             int capacity, int max_quota, int quota_percent) {
  std::vector<int> q(forest.size(), 0);
  for (int& v : q) {
    if (max_quota > 0 && rng.chance(static_cast<std::uint64_t>(quota_percent), 100)) {
      v = rng.between(1, max_quota);
    }
  }
  while (required_seats(forest, q) > capacity) {
    std::vector<std::size_t> positive;
    for (std::size_t t = 0; t < q.size(); ++t) {
      if (q[t] > 0) positive.push_back(t);
    }
    --q[positive[rng.below(positive.size())]];
  }
  return q;
}

inline std::vector<TypeDeclaration> draw_forest(Rng& rng, int types, int max_depth,
                                                const std::string& prefix) {
  std::vector<TypeDeclaration> decls;
  std::vector<int> depth;
  for (int t = 0; t < types; ++t) {
    TypeDeclaration d{prefix + std::to_string(t), std::nullopt};
    std::vector<int> parents;
    for (int p = 0; p < t; ++p) {
      if (depth[p] < max_depth) parents.push_back(p);
    }
    int dep = 1;
    if (!parents.empty() && rng.chance(1, 2)) {
      const int p = parents[rng.below(parents.size())];
      d.parent = decls[p].id;
      dep = depth[p] + 1;
    }
    decls.push_back(std::move(d));
    depth.push_back(dep);
  }
  return decls;
}

}  // namespace detail

inline void check_params(const GenParams& p) {
  auto bad = [](const std::string& what) { throw Error(IssueCode::kBadParams, what); };
  if (p.individuals < 0 || p.institutions < 0) bad("counts must be nonnegative");
  int share = 0;
  for (int c : p.category_percent) {
    if (c < 0) bad("category shares must be nonnegative");
    share += c;
  }
  if (share > 100) bad("category shares exceed 100 percent");
  if (p.horizontal_types < 0 || p.horizontal_types > static_cast<int>(kMaxHorizontalTypes)) {
    bad("horizontal type count out of range");
  }
  if (p.max_depth < 1) bad("max_depth must be at least 1");
  if (p.typed_percent < 0 || p.typed_percent > 100) bad("typed_percent out of range");
  if (p.quota_percent < 0 || p.quota_percent > 100) bad("quota_percent out of range");
  if (p.min_capacity < 0 || p.max_capacity < p.min_capacity) bad("capacity range is empty");
  if (p.max_quota < 0) bad("max_quota must be nonnegative");
  if (p.min_list_length < 0) bad("min_list_length must be nonnegative");
}

/// Raw description of a random instance. Scores are distinct integers and
/// every quota vector fits its category's capacity.
inline RawInstance generate_raw_instance(std::uint64_t seed, const GenParams& params) {
  check_params(params);
  Rng rng(seed);
  RawInstance raw;
  raw.horizontal_types = detail::draw_forest(rng, params.horizontal_types, params.max_depth, "h");
  const HierarchyForest forest = make_forest(raw.horizontal_types);

  std::vector<std::string> person_ids;
  for (int i = 0; i < params.individuals; ++i) {
    person_ids.push_back(detail::padded_id('i', i, params.individuals));
  }
  std::vector<std::string> inst_ids;
  for (int s = 0; s < params.institutions; ++s) {
    inst_ids.push_back(detail::padded_id('s', s, params.institutions));
  }

  for (int i = 0; i < params.individuals; ++i) {
    RawIndividual ind;
    ind.id = person_ids[i];
    int roll = static_cast<int>(rng.below(100));
    for (std::size_t c = 0; c < 4; ++c) {
      if (roll < params.category_percent[c]) {
        ind.membership = std::string{to_string(kVerticalCategories[c + 1])};
        break;
      }
      roll -= params.category_percent[c];
    }
    if (!forest.empty() && rng.chance(static_cast<std::uint64_t>(params.typed_percent), 100)) {
      const TypeIndex t = type(rng.below(forest.size()));
      for (TypeIndex a : forest.closure(t).members()) ind.horizontal_types.push_back(forest.id(a));
    }
    std::vector<RawPreference> pairs;
    for (const auto& s : inst_ids) {
      pairs.push_back({s, "o"});
      if (ind.membership != "g") pairs.push_back({s, ind.membership});
    }
    rng.shuffle(pairs);
    const int lo = std::min(params.min_list_length, static_cast<int>(pairs.size()));
    pairs.resize(static_cast<std::size_t>(rng.between(lo, static_cast<int>(pairs.size()))));
    ind.preferences = std::move(pairs);
    raw.individuals.push_back(std::move(ind));
  }

  std::vector<int> shared(params.individuals);
  std::iota(shared.begin(), shared.end(), 0);
  rng.shuffle(shared);
  for (int s = 0; s < params.institutions; ++s) {
    RawInstitution inst;
    inst.id = inst_ids[s];
    const int total = rng.between(params.min_capacity, params.max_capacity);
    inst.total_capacity = total;
    int left = total;
    CategoryArray<int> cap{};
    for (std::size_t c = 1; c < kVerticalCategoryCount; ++c) {
      if (left > 0 && rng.chance(1, 2)) cap[c] = rng.between(1, std::min(left, std::max(1, total / 3)));
      left -= cap[c];
      inst.vertical_capacities[std::string{to_string(kVerticalCategories[c])}] = cap[c];
    }
    cap[0] = left;
    for (std::size_t c = 0; c < kVerticalCategoryCount; ++c) {
      const auto q = detail::draw_feasible_quotas(rng, forest, cap[c], params.max_quota,
                                                  params.quota_percent);
      auto& row = inst.horizontal_reservations[std::string{to_string(kVerticalCategories[c])}];
      for (std::size_t t = 0; t < q.size(); ++t) {
        if (q[t] > 0) row[forest.id(type(t))] = q[t];
      }
      if (row.empty()) inst.horizontal_reservations.erase(std::string{to_string(kVerticalCategories[c])});
    }
    std::vector<int> order = shared;
    if (!params.common_ranking) rng.shuffle(order);
    // order[k] is the person at merit position k.
    for (int k = 0; k < params.individuals; ++k) {
      inst.merit_scores[person_ids[order[k]]] = std::to_string(1000 - k);
    }
    raw.institutions.push_back(std::move(inst));
  }
  return raw;
}

/// Deterministic per seed; the result always validates.
inline Instance generate_instance(std::uint64_t seed, const GenParams& params) {
  return make_instance(generate_raw_instance(seed, params));
}

// ---------------------------------------------------------------------------
// Within-category choice problems

struct ChoiceProblem {
  HierarchyForest forest;
  std::vector<int> quotas;
  int capacity = 0;
  /// Ranks are a permutation of 0..size-1.
  std::vector<Applicant> pool;
};

struct ChoiceSamplerParams {
  int max_pool = 8;
  int max_types = 3;
  int max_depth = 3;
  int max_capacity = 5;
  int max_quota = 2;
  int typed_percent = 60;
  /// Trim quotas until their seat requirement fits the capacity.
  bool feasible_quotas = true;
};

inline ChoiceProblem sample_choice_problem(Rng& rng, const ChoiceSamplerParams& params) {
  ChoiceProblem p;
  const int types = rng.between(0, params.max_types);
  p.forest = make_forest(detail::draw_forest(rng, types, params.max_depth, "h"));
  p.capacity = rng.between(0, params.max_capacity);
  if (params.feasible_quotas) {
    p.quotas = detail::draw_feasible_quotas(rng, p.forest, p.capacity, params.max_quota, 70);
  } else {
    p.quotas.assign(p.forest.size(), 0);
    for (int& q : p.quotas) q = rng.between(0, params.max_quota);
  }
  const int n = rng.between(0, params.max_pool);
  std::vector<std::uint32_t> ranks(n);
  std::iota(ranks.begin(), ranks.end(), 0u);
  rng.shuffle(ranks);
  for (int i = 0; i < n; ++i) {
    Applicant a{person(i), ranks[i], {}};
    if (!p.forest.empty() && rng.chance(static_cast<std::uint64_t>(params.typed_percent), 100)) {
      a.types = p.forest.closure(type(rng.below(p.forest.size())));
    }
    p.pool.push_back(a);
  }
  return p;
}

}  // namespace hres
