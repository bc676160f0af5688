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

// Institution-level choice: vertical categories pick in the fixed
// precedence o, SC, ST, OBC, EWS, each with the hierarchical rule. Under
// forward transfer, vacant OBC seats become a final de-reserved pool D
// filled by merit among everyone still unchosen.

#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "hres/hierarchical_choice.hpp"
#include "hres/instance.hpp"

namespace hres {

enum class Variant : std::uint8_t { kPlain, kTransfer };

constexpr std::string_view to_string(Variant v) {
  return v == Variant::kPlain ? "plain" : "transfer";
}

/// Which remaining contracts the de-reserved pool may bind.
enum class DereservedPool : std::uint8_t {
  /// Any remaining contract; an individual with several binds the one they
  /// rank highest.
  kAnyRemainingContract,
  kOpenContractsOnly,
};

struct AggregateConfig {
  std::vector<Category> precedence;
  CategoryArray<int> capacity{};
  CategoryArray<std::vector<int>> quotas;
  bool transfer = false;
  DereservedPool dereserved_pool = DereservedPool::kAnyRemainingContract;
  /// Replaces the institution's merit positions when non-empty. Only used to
  /// build deliberately broken rules in tests.
  std::vector<std::uint32_t> rank_override;
};

inline std::vector<Category> standard_precedence(bool transfer) {
  std::vector<Category> p(kVerticalCategories.begin(), kVerticalCategories.end());
  if (transfer) p.push_back(Category::kDereserved);
  return p;
}

inline bool has_standard_precedence(const AggregateConfig& config) {
  return config.precedence == standard_precedence(config.transfer);
}

inline AggregateConfig make_aggregate_config(const Instance& instance, InstitutionIndex s,
                                             Variant variant) {
  const auto& inst = instance.institution(s);
  AggregateConfig config;
  config.transfer = variant == Variant::kTransfer;
  config.precedence = standard_precedence(config.transfer);
  config.capacity = inst.capacity;
  config.quotas = inst.quotas;
  return config;
}

struct SeatAssignment {
  Contract contract;
  /// Category whose seats were used; kDereserved for transferred OBC seats.
  Category seat_pool;

  auto operator<=>(const SeatAssignment&) const = default;
};

struct CategoryReport {
  Category category;
  int capacity = 0;
  /// H_k: contracts of this category (any, for D) whose individual was not
  /// chosen by an earlier category.
  std::vector<Contract> available;
  /// Contracts held back because their individual was already chosen.
  std::vector<Contract> unavailable;
  std::vector<Contract> chosen;
  std::vector<Contract> rejected;
  /// Chosen individuals per horizontal type (one-to-all).
  std::vector<int> type_fill;
  /// Empty for the de-reserved pool.
  ChoiceTrace trace;
};

struct AggregateOutcome {
  InstitutionIndex institution;
  /// Precedence order, selection order within a category.
  std::vector<SeatAssignment> chosen;
  std::vector<CategoryReport> categories;
  /// q^OBC minus OBC seats filled.
  int obc_vacancies = 0;
  /// Capacity handed to the de-reserved pool (0 without transfer).
  int dereserved_capacity = 0;

  std::vector<Contract> contracts() const {
    std::vector<Contract> out;
    out.reserve(chosen.size());
    for (const auto& a : chosen) out.push_back(a.contract);
    std::sort(out.begin(), out.end());
    return out;
  }
};

/// The aggregate choice rule of one institution, bound to an instance and a
/// reported preference profile (used only to pick which contract a
/// de-reserved seat binds).
class InstitutionRule {
 public:
  InstitutionRule(const Instance& instance, InstitutionIndex s, AggregateConfig config,
                  const Profile* profile = nullptr)
      : instance_(&instance), institution_(s), config_(std::move(config)), profile_(profile) {
    instance.institution(s);
    for (const auto& q : config_.quotas) {
      if (q.size() != instance.forest().size()) {
        throw Error(IssueCode::kQuotaIndexMismatch, "quota vector does not match the forest");
      }
    }
    if (!config_.rank_override.empty() &&
        config_.rank_override.size() != instance.individual_count()) {
      throw Error(IssueCode::kBadParams, "rank override must cover every individual");
    }
    const bool has_d = std::find(config_.precedence.begin(), config_.precedence.end(),
                                 Category::kDereserved) != config_.precedence.end();
    if (has_d != config_.transfer) {
      throw Error(IssueCode::kBadParams, "category D must appear iff transfer is enabled");
    }
  }

  InstitutionRule(const Instance& instance, InstitutionIndex s, Variant variant,
                  const Profile* profile = nullptr)
      : InstitutionRule(instance, s, make_aggregate_config(instance, s, variant), profile) {}

  const AggregateConfig& config() const { return config_; }
  InstitutionIndex institution() const { return institution_; }

  AggregateOutcome choose(std::span<const Contract> offers) const {
    const auto contracts = normalize(offers);
    const std::size_t n = instance_->individual_count();
    std::vector<bool> chosen_person(n, false);

    AggregateOutcome out;
    out.institution = institution_;
    int obc_filled = 0;
    for (Category k : config_.precedence) {
      CategoryReport report;
      report.category = k;
      if (k == Category::kDereserved) {
        report.capacity = std::max(0, config_.capacity[slot_of(Category::kOBC)] - obc_filled);
        out.dereserved_capacity = report.capacity;
        for (const auto& c : contracts) {
          if (!in_dereserved_pool(c)) continue;
          (chosen_person[c.person.value] ? report.unavailable : report.available).push_back(c);
        }
        report.chosen = choose_dereserved(report.available, report.capacity);
      } else {
        report.capacity = config_.capacity[slot_of(k)];
        for (const auto& c : contracts) {
          if (c.category != k) continue;
          (chosen_person[c.person.value] ? report.unavailable : report.available).push_back(c);
        }
        auto choice = choose_vertical(k, report.available, report.capacity);
        report.chosen = std::move(choice.first);
        report.trace = std::move(choice.second);
        if (k == Category::kOBC) obc_filled = static_cast<int>(report.chosen.size());
      }

      report.type_fill.assign(instance_->forest().size(), 0);
      for (const auto& c : report.chosen) {
        if (chosen_person[c.person.value]) {
          throw Error(IssueCode::kMixedIndividualState,
                      "individual " + instance_->individual(c.person).id + " chosen twice");
        }
        chosen_person[c.person.value] = true;
        for (TypeIndex t : instance_->individual(c.person).types.members()) {
          ++report.type_fill[t.value];
        }
        out.chosen.push_back({c, k});
      }
      for (const auto& c : report.available) {
        if (std::find(report.chosen.begin(), report.chosen.end(), c) == report.chosen.end()) {
          report.rejected.push_back(c);
        }
      }
      out.categories.push_back(std::move(report));
    }
    out.obc_vacancies = std::max(0, config_.capacity[slot_of(Category::kOBC)] - obc_filled);
    return out;
  }

  std::vector<Contract> operator()(std::span<const Contract> offers) const {
    return choose(offers).contracts();
  }

  /// C_k(available; capacity) for one category in isolation.
  std::vector<Contract> choose_category(Category k, std::span<const Contract> available,
                                        int capacity) const {
    auto contracts = normalize(available);
    if (k == Category::kDereserved) return choose_dereserved(contracts, capacity);
    std::erase_if(contracts, [&](const Contract& c) { return c.category != k; });
    return choose_vertical(k, contracts, capacity).first;
  }

 private:
  std::uint32_t rank_of(PersonIndex p) const {
    if (!config_.rank_override.empty()) return config_.rank_override[p.value];
    return instance_->institution(institution_).rank[p.value];
  }

  const PreferenceList& preferences_of(PersonIndex p) const {
    if (profile_ != nullptr) return profile_->at(p.value);
    return instance_->individual(p).preferences;
  }

  bool in_dereserved_pool(const Contract& c) const {
    return config_.dereserved_pool == DereservedPool::kAnyRemainingContract ||
           c.category == Category::kOpen;
  }

  std::vector<Contract> normalize(std::span<const Contract> offers) const {
    std::vector<Contract> out(offers.begin(), offers.end());
    for (const auto& c : out) {
      if (c.institution != institution_) {
        throw Error(IssueCode::kForeignContract,
                    "contract at institution " + std::to_string(c.institution.value) +
                        " offered to " + instance_->institution(institution_).id);
      }
      if (c.category == Category::kDereserved ||
          !eligible(instance_->individual(c.person).membership, c.category)) {
        throw Error(IssueCode::kIneligibleContract,
                    instance_->individual(c.person).id + " cannot hold category " +
                        std::string{to_string(c.category)});
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::pair<std::vector<Contract>, ChoiceTrace> choose_vertical(
      Category k, std::span<const Contract> available, int capacity) const {
    std::vector<Applicant> pool;
    pool.reserve(available.size());
    for (const auto& c : available) {
      pool.push_back({c.person, rank_of(c.person), instance_->individual(c.person).types});
    }
    auto choice =
        choose_hierarchical(pool, config_.quotas[slot_of(k)], capacity, instance_->forest());
    std::vector<Contract> chosen;
    chosen.reserve(choice.chosen.size());
    for (PersonIndex p : choice.chosen) chosen.push_back({p, institution_, k});
    return {std::move(chosen), std::move(choice.trace)};
  }

  /// Responsive merit choice over individuals; binds each chosen
  /// individual's most preferred remaining contract.
  std::vector<Contract> choose_dereserved(std::span<const Contract> available,
                                          int capacity) const {
    std::vector<Contract> best;  // one per individual
    for (const auto& c : available) {
      if (!best.empty() && best.back().person == c.person) {
        if (binds_before(c, best.back())) best.back() = c;
        continue;
      }
      best.push_back(c);
    }
    std::sort(best.begin(), best.end(), [&](const Contract& a, const Contract& b) {
      return rank_of(a.person) < rank_of(b.person);
    });
    if (static_cast<int>(best.size()) > capacity) best.resize(std::max(capacity, 0));
    return best;
  }

  bool binds_before(const Contract& a, const Contract& b) const {
    const auto& list = preferences_of(a.person);
    const auto pa = preference_position(list, a.slot());
    const auto pb = preference_position(list, b.slot());
    if (pa && pb) return *pa < *pb;
    if (pa || pb) return pa.has_value();
    return a.category < b.category;
  }

  const Instance* instance_;
  InstitutionIndex institution_;
  AggregateConfig config_;
  const Profile* profile_;
};

/// Aggregate choice without transfer.
inline AggregateOutcome choose_aggregate(const Instance& instance, InstitutionIndex s,
                                         std::span<const Contract> offers,
                                         const AggregateConfig& config) {
  if (config.transfer) {
    throw Error(IssueCode::kBadParams, "choose_aggregate called with a transfer config");
  }
  return InstitutionRule(instance, s, config).choose(offers);
}

inline AggregateOutcome choose_aggregate(const Instance& instance, InstitutionIndex s,
                                         std::span<const Contract> offers) {
  return choose_aggregate(instance, s, offers, make_aggregate_config(instance, s, Variant::kPlain));
}

/// Aggregate choice with forward transfer of vacant OBC seats.
inline AggregateOutcome choose_aggregate_transfer(const Instance& instance, InstitutionIndex s,
                                                  std::span<const Contract> offers,
                                                  const AggregateConfig& config) {
  if (!config.transfer) {
    throw Error(IssueCode::kBadParams, "choose_aggregate_transfer needs a transfer config");
  }
  return InstitutionRule(instance, s, config).choose(offers);
}

inline AggregateOutcome choose_aggregate_transfer(const Instance& instance, InstitutionIndex s,
                                                  std::span<const Contract> offers) {
  return choose_aggregate_transfer(instance, s, offers,
                                   make_aggregate_config(instance, s, Variant::kTransfer));
}

/// Every acceptable contract at s, i.e. what each individual would offer if
/// they went through their whole list.
inline std::vector<Contract> acceptable_offers(const Instance& instance, InstitutionIndex s) {
  std::vector<Contract> out;
  for (std::size_t p = 0; p < instance.individual_count(); ++p) {
    for (const auto& slot : instance.individuals()[p].preferences) {
      if (slot.institution == s) out.push_back({person(p), s, slot.category});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hres
