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

// Cumulative offer mechanism. Unheld individuals propose down their lists;
// each institution holds its aggregate choice from everything ever offered
// to it. The optional log records, per institution evaluation and category,
// the sets needed to check offer-process monotonicity.

#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "hres/aggregate_choice.hpp"
#include "hres/instance.hpp"
#include "hres/random.hpp"

namespace hres {

enum class ProposalOrder : std::uint8_t { kLowestId, kSeededRandom };

struct ProposalPolicy {
  ProposalOrder order = ProposalOrder::kLowestId;
  std::uint64_t seed = 0;

  static ProposalPolicy lowest_id() { return {}; }
  static ProposalPolicy seeded(std::uint64_t seed) {
    return {ProposalOrder::kSeededRandom, seed};
  }
};

struct CopOptions {
  Variant variant = Variant::kPlain;
  ProposalPolicy policy;
  bool record_log = false;
  DereservedPool dereserved_pool = DereservedPool::kAnyRemainingContract;
};

struct CategorySnapshot {
  Category category;
  /// q_k at this evaluation.
  int capacity = 0;
  /// H_k.
  std::vector<Contract> available;
  /// C_k(H_k; q_k).
  std::vector<Contract> chosen;
  /// F_k: union of H_k over this and all earlier evaluations.
  std::vector<Contract> cumulative;
  /// C_k(F_k; q_k).
  std::vector<Contract> chosen_from_cumulative;
  /// R_k = F_k minus C_k(F_k; q_k).
  std::vector<Contract> rejected;
};

struct OfferStep {
  /// 1-based.
  std::size_t index = 0;
  PersonIndex proposer;
  Contract proposal;
  /// Everything offered to the proposal's institution so far, this step included.
  std::vector<Contract> cumulative;
  /// C_s(cumulative).
  std::vector<Contract> held_after;
  std::vector<CategorySnapshot> categories;
};

struct OfferProcessLog {
  std::vector<OfferStep> steps;
  Matching final_held;
};

struct MechanismOutcome {
  Matching matching;
  /// Empty unless requested.
  OfferProcessLog log;
  std::vector<std::optional<Contract>> assignment;
  /// Final seats with their pools, sorted by contract.
  std::vector<SeatAssignment> seats;
  std::size_t steps = 0;
};

namespace detail {

inline std::vector<Contract> set_union(const std::vector<Contract>& a,
                                       const std::vector<Contract>& b) {
  std::vector<Contract> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline std::vector<Contract> set_difference(const std::vector<Contract>& a,
                                            const std::vector<Contract>& b) {
  std::vector<Contract> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool subset(const std::vector<Contract>& a, const std::vector<Contract>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline std::vector<Contract> sorted(std::vector<Contract> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace detail

/// Runs the offer process with caller-supplied institution rules (one per
/// institution, in index order). `profile` gives the lists individuals
/// propose from.
inline MechanismOutcome run_cumulative_offer(const Instance& instance, const Profile& profile,
                                             const std::vector<InstitutionRule>& rules,
                                             ProposalPolicy policy, bool record_log) {
  const std::size_t n = instance.individual_count();
  const std::size_t m = instance.institution_count();
  if (profile.size() != n || rules.size() != m) {
    throw Error(IssueCode::kSizeMismatch, "profile or rule count does not match the instance");
  }

  std::size_t universe = 0;
  for (const auto& list : profile) universe += list.size();

  std::vector<std::size_t> next(n, 0);
  std::vector<std::optional<InstitutionIndex>> held_at(n);
  std::vector<std::vector<Contract>> offers(m);
  std::vector<std::vector<Contract>> held(m);
  std::vector<std::vector<SeatAssignment>> seats(m);
  std::vector<std::vector<std::vector<Contract>>> cumulative(m);
  std::optional<Rng> rng;
  if (policy.order == ProposalOrder::kSeededRandom) rng.emplace(policy.seed);

  MechanismOutcome out;
  std::vector<PersonIndex> ready;
  while (true) {
    ready.clear();
    for (PersonIndex p : instance.id_order()) {
      if (!held_at[p.value] && next[p.value] < profile[p.value].size()) ready.push_back(p);
    }
    if (ready.empty()) break;
    if (++out.steps > universe) {
      throw Error(IssueCode::kNonterminationGuard,
                  "offer process exceeded " + std::to_string(universe) + " steps");
    }
    const PersonIndex p = rng ? ready[rng->below(ready.size())] : ready.front();
    const Slot slot = profile[p.value][next[p.value]++];
    const Contract x{p, slot.institution, slot.category};
    const std::size_t s = slot.institution.value;
    if (s >= m) throw Error(IssueCode::kUnknownInstitution, "preference names a missing institution");

    auto& pool = offers[s];
    pool.insert(std::upper_bound(pool.begin(), pool.end(), x), x);
    auto result = rules[s].choose(pool);

    for (const auto& c : held[s]) held_at[c.person.value].reset();
    held[s] = result.contracts();
    for (const auto& c : held[s]) {
      if (held_at[c.person.value]) {
        throw Error(IssueCode::kMixedIndividualState,
                    instance.individual(c.person).id + " held at two institutions");
      }
      held_at[c.person.value] = slot.institution;
    }
    seats[s] = result.chosen;

    if (!record_log) continue;
    OfferStep step;
    step.index = out.steps;
    step.proposer = p;
    step.proposal = x;
    step.cumulative = pool;
    step.held_after = held[s];
    auto& f = cumulative[s];
    f.resize(result.categories.size());
    for (std::size_t k = 0; k < result.categories.size(); ++k) {
      const auto& report = result.categories[k];
      CategorySnapshot snap;
      snap.category = report.category;
      snap.capacity = report.capacity;
      snap.available = detail::sorted(report.available);
      snap.chosen = detail::sorted(report.chosen);
      f[k] = detail::set_union(f[k], snap.available);
      snap.cumulative = f[k];
      snap.chosen_from_cumulative =
          detail::sorted(rules[s].choose_category(report.category, f[k], report.capacity));
      snap.rejected = detail::set_difference(f[k], snap.chosen_from_cumulative);
      step.categories.push_back(std::move(snap));
    }
    out.log.steps.push_back(std::move(step));
  }

  std::vector<Contract> all;
  for (std::size_t s = 0; s < m; ++s) {
    all.insert(all.end(), held[s].begin(), held[s].end());
    out.seats.insert(out.seats.end(), seats[s].begin(), seats[s].end());
  }
  std::sort(out.seats.begin(), out.seats.end());
  out.matching = Matching(std::move(all));
  out.assignment = out.matching.assignment(n);
  if (record_log) out.log.final_held = out.matching;
  return out;
}

inline std::vector<InstitutionRule> make_rules(const Instance& instance, const Profile& profile,
                                               Variant variant, DereservedPool pool) {
  std::vector<InstitutionRule> rules;
  rules.reserve(instance.institution_count());
  for (std::size_t s = 0; s < instance.institution_count(); ++s) {
    auto config = make_aggregate_config(instance, institution(s), variant);
    config.dereserved_pool = pool;
    rules.emplace_back(instance, institution(s), std::move(config), &profile);
  }
  return rules;
}

/// Φ^h (plain) or Φ^hT (transfer) under a reported profile.
inline MechanismOutcome run_cop(const Instance& instance, const Profile& profile,
                                const CopOptions& options = {}) {
  const auto rules = make_rules(instance, profile, options.variant, options.dereserved_pool);
  return run_cumulative_offer(instance, profile, rules, options.policy, options.record_log);
}

inline MechanismOutcome run_cop(const Instance& instance, const CopOptions& options = {}) {
  const Profile profile = instance.profile();
  return run_cop(instance, profile, options);
}

// ---------------------------------------------------------------------------
// Offer-process monitors

struct OfferViolation {
  std::size_t step = 0;
  InstitutionIndex institution;
  Category category;
  /// 1 to 5, see monitor_offer_process.
  int condition = 0;
  std::string detail;
};

/// Checks, for every institution's sequence of evaluations and every
/// category k, comparing evaluation m with the previous one at the same
/// institution:
///   (1) C_k(H_k) before is contained in H_k now;
///   (2) C_k(F_k) now is contained in C_k(H_k) before plus newly available;
///   (3) C_k(H_k) = C_k(F_k) now;
///   (4) q_k does not increase;
///   (5) R_k before is contained in R_k now.
inline std::vector<OfferViolation> monitor_offer_process(const OfferProcessLog& log) {
  std::vector<OfferViolation> out;
  std::vector<const OfferStep*> last;
  std::size_t prev_index = 0;
  for (const auto& step : log.steps) {
    if (step.index <= prev_index) {
      throw Error(IssueCode::kMalformedLog, "step indices must increase");
    }
    prev_index = step.index;
    const std::size_t s = step.proposal.institution.value;
    if (s >= last.size()) last.resize(s + 1, nullptr);
    const OfferStep* prev = last[s];
    if (!std::is_sorted(step.cumulative.begin(), step.cumulative.end()) ||
        !std::binary_search(step.cumulative.begin(), step.cumulative.end(), step.proposal)) {
      throw Error(IssueCode::kMalformedLog,
                  "step " + std::to_string(step.index) + " cumulative set lacks the proposal");
    }
    if (prev != nullptr) {
      if (prev->categories.size() != step.categories.size()) {
        throw Error(IssueCode::kMalformedLog,
                    "category list changes at step " + std::to_string(step.index));
      }
      auto expected = prev->cumulative;
      expected.insert(std::upper_bound(expected.begin(), expected.end(), step.proposal),
                      step.proposal);
      if (expected != step.cumulative) {
        throw Error(IssueCode::kMalformedLog,
                    "cumulative set at step " + std::to_string(step.index) +
                        " is not the previous set plus the proposal");
      }
    } else if (step.cumulative.size() != 1) {
      throw Error(IssueCode::kMalformedLog,
                  "first offer to an institution must leave one cumulative contract");
    }

    for (std::size_t k = 0; k < step.categories.size(); ++k) {
      const auto& cur = step.categories[k];
      const CategorySnapshot* before = prev ? &prev->categories[k] : nullptr;
      if (before != nullptr && before->category != cur.category) {
        throw Error(IssueCode::kMalformedLog,
                    "category order changes at step " + std::to_string(step.index));
      }
      const std::vector<Contract> none;
      const auto& prev_available = before ? before->available : none;
      const auto& prev_chosen = before ? before->chosen : none;
      const auto& prev_rejected = before ? before->rejected : none;
      const auto& prev_cumulative = before ? before->cumulative : none;
      if (detail::set_union(prev_cumulative, cur.available) != cur.cumulative) {
        throw Error(IssueCode::kMalformedLog,
                    "F_k at step " + std::to_string(step.index) +
                        " is not the running union of available sets");
      }
      auto flag = [&](int condition, std::string detail) {
        out.push_back({step.index, step.proposal.institution, cur.category, condition,
                       std::move(detail)});
      };
      if (!detail::subset(prev_chosen, cur.available)) {
        flag(1, "a previously chosen contract is no longer available");
      }
      const auto fresh = detail::set_difference(cur.available, prev_available);
      if (!detail::subset(cur.chosen_from_cumulative, detail::set_union(prev_chosen, fresh))) {
        flag(2, "choice from F_k picks a contract neither chosen before nor newly available");
      }
      if (cur.chosen != cur.chosen_from_cumulative) {
        flag(3, "choice from H_k differs from choice from F_k");
      }
      if (before != nullptr && before->capacity < cur.capacity) {
        flag(4, "capacity rose from " + std::to_string(before->capacity) + " to " +
                    std::to_string(cur.capacity));
      }
      if (!detail::subset(prev_rejected, cur.rejected)) {
        flag(5, "a rejected contract from F_k is no longer rejected");
      }
    }
    last[s] = &step;
  }
  return out;
}

/// Structural checks of a log against the profile it was produced under:
/// proposers hold nothing, propose their next list entry, and were not
/// chosen by the institution beforehand. Returns human-readable problems.
inline std::vector<std::string> check_log_invariants(const OfferProcessLog& log,
                                                     const Profile& profile) {
  std::vector<std::string> out;
  std::vector<std::size_t> next(profile.size(), 0);
  std::vector<std::vector<Contract>> held;
  std::vector<std::vector<Contract>> cumulative;
  auto holds_anything = [&](PersonIndex p) {
    for (const auto& h : held) {
      for (const auto& c : h) {
        if (c.person == p) return true;
      }
    }
    return false;
  };
  for (const auto& step : log.steps) {
    const std::string where = "step " + std::to_string(step.index) + ": ";
    const PersonIndex p = step.proposer;
    if (p.value >= profile.size()) {
      out.push_back(where + "unknown proposer");
      continue;
    }
    const std::size_t s = step.proposal.institution.value;
    if (s >= held.size()) {
      held.resize(s + 1);
      cumulative.resize(s + 1);
    }
    if (step.proposal.person != p) out.push_back(where + "proposal belongs to someone else");
    if (holds_anything(p)) out.push_back(where + "proposer already holds a contract");
    for (const auto& c : held[s]) {
      if (c.person == p) out.push_back(where + "proposer was chosen before proposing");
    }
    const auto& list = profile[p.value];
    if (next[p.value] >= list.size() || list[next[p.value]] != step.proposal.slot()) {
      out.push_back(where + "proposal is not the proposer's next list entry");
    }
    ++next[p.value];
    auto& pool = cumulative[s];
    pool.insert(std::upper_bound(pool.begin(), pool.end(), step.proposal), step.proposal);
    if (pool != step.cumulative) out.push_back(where + "cumulative set did not grow by one");
    if (!detail::subset(step.held_after, step.cumulative)) {
      out.push_back(where + "held set is not drawn from the cumulative set");
    }
    held[s] = step.held_after;
  }
  std::vector<Contract> final_held;
  for (const auto& h : held) final_held.insert(final_held.end(), h.begin(), h.end());
  if (!log.steps.empty() && Matching(final_held) != log.final_held) {
    out.push_back("final matching differs from the last held sets");
  }
  return out;
}

}  // namespace hres
