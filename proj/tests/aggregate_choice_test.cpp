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

#include <gtest/gtest.h>

#include <set>

#include "hres/hres.hpp"
#include "support/fixtures.hpp"

namespace hres {
namespace {

using testing::contract;
using testing::raw_person;

const InstitutionIndex kS = institution(0);

std::vector<Contract> with(std::vector<Contract> set, std::initializer_list<Contract> extra) {
  set.insert(set.end(), extra.begin(), extra.end());
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

bool contains(const std::vector<Contract>& set, const Contract& c) {
  return std::find(set.begin(), set.end(), c) != set.end();
}

std::set<PersonIndex> people_of(const std::vector<Contract>& set) {
  std::set<PersonIndex> out;
  for (const auto& c : set) out.insert(c.person);
  return out;
}

// Two SC applicants for one SC seat and one OBC seat, no
// open seat. a (90) prefers the open contract, b (80) the SC one.
RawInstance sc_binding_raw() {
  RawInstance raw;
  RawInstitution s{"s", 2, {{"SC", 1}, {"OBC", 1}}, {}, {{"a", "90"}, {"b", "80"}}};
  raw.institutions = {s};
  raw.individuals = {raw_person("a", "SC", {}, {{"s", "o"}, {"s", "SC"}}),
                     raw_person("b", "SC", {}, {{"s", "SC"}, {"s", "o"}})};
  return raw;
}

Instance random_instance(Rng& rng) {
  GenParams p;
  p.individuals = rng.between(2, 8);
  p.institutions = 1;
  p.horizontal_types = rng.between(0, 3);
  p.max_depth = rng.between(1, 3);
  p.max_capacity = rng.between(2, 5);
  p.max_quota = rng.between(0, 2);
  p.category_percent = {15, 10, 30, 10};
  return generate_instance(rng.next(), p);
}

std::vector<Contract> random_subset(Rng& rng, const std::vector<Contract>& universe) {
  std::vector<Contract> out;
  for (const auto& c : universe) {
    if (rng.chance(1, 2)) out.push_back(c);
  }
  return out;
}

TEST(AggregateChoiceTest, OverAndAboveTakesOpenSeatFirst) {
  const auto inst = make_instance(testing::over_and_above_raw());
  const auto offers = acceptable_offers(inst, kS);
  const auto out = choose_aggregate(inst, kS, offers);
  const std::vector<SeatAssignment> expected = {
      {contract(inst, "a", "s", Category::kOpen), Category::kOpen},
      {contract(inst, "b", "s", Category::kOBC), Category::kOBC}};
  EXPECT_EQ(out.chosen, expected);
  EXPECT_EQ(out.obc_vacancies, 0);

  const auto& obc = out.categories[3];
  ASSERT_EQ(obc.category, Category::kOBC);
  EXPECT_EQ(obc.unavailable, (std::vector<Contract>{contract(inst, "a", "s", Category::kOBC)}));
  const auto& open = out.categories[0];
  EXPECT_EQ(open.rejected, (std::vector<Contract>{contract(inst, "c", "s", Category::kOpen)}));
  EXPECT_TRUE(check_fairness(inst, kS, offers, out.contracts()).passed());
}

TEST(AggregateChoiceTest, NoOffersLeavesEverySeatVacant) {
  const auto inst = make_instance(testing::over_and_above_raw());
  const auto out = choose_aggregate(inst, kS, {});
  EXPECT_TRUE(out.chosen.empty());
  EXPECT_EQ(out.obc_vacancies, 1);
  EXPECT_EQ(out.categories.size(), 5u);
  for (const auto& r : out.categories) EXPECT_TRUE(r.available.empty());
  EXPECT_EQ(choose_aggregate_transfer(inst, kS, {}).dereserved_capacity, 1);
}

TEST(AggregateChoiceTest, OpenOnlyOffersLeaveObcSeatsEmptyWithoutTransfer) {
  const auto inst = make_instance(testing::transfer_raw());
  const std::vector<Contract> offers = {contract(inst, "g", "s", Category::kOpen)};
  const auto out = choose_aggregate(inst, kS, offers);
  EXPECT_TRUE(out.chosen.empty());
  EXPECT_EQ(out.obc_vacancies, 2);
  EXPECT_EQ(out.dereserved_capacity, 0);
}

TEST(AggregateTransferTest, VacantObcSeatGoesToGeneralApplicant) {
  const auto inst = make_instance(testing::transfer_raw());
  const auto offers = acceptable_offers(inst, kS);
  const auto out = choose_aggregate_transfer(inst, kS, offers);
  const std::vector<SeatAssignment> expected = {
      {contract(inst, "k", "s", Category::kOBC), Category::kOBC},
      {contract(inst, "g", "s", Category::kOpen), Category::kDereserved}};
  EXPECT_EQ(out.chosen, expected);
  EXPECT_EQ(out.obc_vacancies, 1);
  EXPECT_EQ(out.dereserved_capacity, 1);
  EXPECT_EQ(out.categories.back().category, Category::kDereserved);
  EXPECT_TRUE(out.categories.back().trace.empty());
  EXPECT_TRUE(check_seat_caps(inst, out.chosen, Variant::kTransfer).passed());
  EXPECT_FALSE(check_seat_caps(inst, out.chosen, Variant::kPlain).passed());
}

TEST(AggregateTransferTest, FullObcCategoryMatchesPlainRule) {
  const auto inst = make_instance(testing::over_and_above_raw());
  const auto offers = acceptable_offers(inst, kS);
  const auto plain = choose_aggregate(inst, kS, offers);
  const auto transfer = choose_aggregate_transfer(inst, kS, offers);
  EXPECT_EQ(transfer.chosen, plain.chosen);
  EXPECT_EQ(transfer.dereserved_capacity, 0);
}

TEST(AggregateTransferTest, NoObcProposersTransfersEverySeatInMeritOrder) {
  RawInstance raw;
  raw.institutions = {{"s", 3, {{"OBC", 3}}, {}, {{"g1", "70"}, {"g2", "90"}, {"g3", "80"}}}};
  for (const char* id : {"g1", "g2", "g3"}) {
    raw.individuals.push_back(raw_person(id, "g", {}, {{"s", "o"}}));
  }
  const auto inst = make_instance(raw);
  const auto out = choose_aggregate_transfer(inst, kS, acceptable_offers(inst, kS));
  ASSERT_EQ(out.chosen.size(), 3u);
  EXPECT_EQ(out.dereserved_capacity, 3);
  const std::vector<std::string> order = {"g2", "g3", "g1"};
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(out.chosen[k].contract, contract(inst, order[k], "s", Category::kOpen));
    EXPECT_EQ(out.chosen[k].seat_pool, Category::kDereserved);
  }
}

TEST(AggregateTransferTest, DereservedSeatBindsPreferredRemainingContract) {
  const auto inst = make_instance(sc_binding_raw());
  const auto offers = acceptable_offers(inst, kS);
  const auto out = choose_aggregate_transfer(inst, kS, offers);
  const std::vector<SeatAssignment> expected = {
      {contract(inst, "a", "s", Category::kSC), Category::kSC},
      {contract(inst, "b", "s", Category::kSC), Category::kDereserved}};
  EXPECT_EQ(out.chosen, expected);

  auto config = make_aggregate_config(inst, kS, Variant::kTransfer);
  config.dereserved_pool = DereservedPool::kOpenContractsOnly;
  const auto open_only = choose_aggregate_transfer(inst, kS, offers, config);
  EXPECT_EQ(open_only.chosen[1].contract, contract(inst, "b", "s", Category::kOpen));

  Profile reported = inst.profile();
  std::swap(reported[1][0], reported[1][1]);
  const InstitutionRule rule(inst, kS, Variant::kTransfer, &reported);
  EXPECT_TRUE(contains(rule(offers), contract(inst, "b", "s", Category::kOpen)));
}

TEST(InstitutionRuleTest, RejectsMalformedConfigAndOffers) {
  const auto inst = make_instance(testing::over_and_above_raw());
  auto expect_code = [](IssueCode code, auto&& fn) {
    try {
      fn();
      ADD_FAILURE() << "no error";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << e.what();
    }
  };

  auto config = make_aggregate_config(inst, kS, Variant::kPlain);
  config.quotas[0].push_back(1);
  expect_code(IssueCode::kQuotaIndexMismatch, [&] { InstitutionRule(inst, kS, config); });

  config = make_aggregate_config(inst, kS, Variant::kPlain);
  config.transfer = true;
  expect_code(IssueCode::kBadParams, [&] { InstitutionRule(inst, kS, config); });
  config = make_aggregate_config(inst, kS, Variant::kPlain);
  config.rank_override = {0};
  expect_code(IssueCode::kBadParams, [&] { InstitutionRule(inst, kS, config); });
  expect_code(IssueCode::kBadParams, [&] {
    choose_aggregate(inst, kS, {}, make_aggregate_config(inst, kS, Variant::kTransfer));
  });

  const std::vector<Contract> foreign = {{person(0), institution(3), Category::kOpen}};
  expect_code(IssueCode::kForeignContract, [&] { choose_aggregate(inst, kS, foreign); });
  const std::vector<Contract> ineligible = {contract(inst, "c", "s", Category::kOBC)};
  expect_code(IssueCode::kIneligibleContract, [&] { choose_aggregate(inst, kS, ineligible); });
  const std::vector<Contract> d = {contract(inst, "a", "s", Category::kDereserved)};
  expect_code(IssueCode::kIneligibleContract, [&] { choose_aggregate(inst, kS, d); });
}

TEST(InstitutionRuleTest, ChooseCategoryInIsolation) {
  const auto inst = make_instance(testing::over_and_above_raw());
  const InstitutionRule rule(inst, kS, Variant::kPlain);
  const auto offers = acceptable_offers(inst, kS);
  EXPECT_EQ(rule.choose_category(Category::kOBC, offers, 1),
            (std::vector<Contract>{contract(inst, "a", "s", Category::kOBC)}));
  EXPECT_EQ(rule.choose_category(Category::kOpen, offers, 2).size(), 2u);
  EXPECT_TRUE(rule.choose_category(Category::kSC, offers, 5).empty());
}

TEST(AggregateChoiceTest, RandomOffersAreFairAndSeatEachPersonOnce) {
  for (std::uint64_t trial = 0; trial < 400; ++trial) {
    Rng rng = Rng::derive(41, trial);
    const auto inst = random_instance(rng);
    const auto offers = random_subset(rng, build_contract_universe(inst));
    for (Variant v : {Variant::kPlain, Variant::kTransfer}) {
      const auto out = InstitutionRule(inst, kS, v).choose(offers);
      const auto chosen = out.contracts();
      EXPECT_EQ(people_of(chosen).size(), chosen.size());
      for (const auto& c : chosen) EXPECT_TRUE(contains(offers, c));
      const auto fair = check_fairness(inst, kS, offers, chosen);
      EXPECT_TRUE(fair.passed()) << "trial " << trial << ": "
                                 << fair.counterexamples.front().detail;
      EXPECT_TRUE(check_seat_caps(inst, out.chosen, v).passed()) << "trial " << trial;
    }
  }
}

TEST(AggregateTransferTest, ExtraObcOfferNeverRaisesDereservedCapacity) {
  for (std::uint64_t trial = 0; trial < 400; ++trial) {
    Rng rng = Rng::derive(43, trial);
    const auto inst = random_instance(rng);
    const auto universe = build_contract_universe(inst);
    const auto offers = random_subset(rng, universe);
    const InstitutionRule rule(inst, kS, Variant::kTransfer);
    const int before = rule.choose(offers).dereserved_capacity;
    for (const auto& c : universe) {
      if (c.category != Category::kOBC) continue;
      EXPECT_LE(rule.choose(with(offers, {c})).dereserved_capacity, before);
    }
  }
}

// Contract-level substitutes fail when an individual already holding a
// reserved seat adds an open contract: moving them to the open seat frees
// the reserved one.
TEST(AggregateChoiceTest, ContractLevelSubstitutesCanFail) {
  const auto inst = make_instance(testing::over_and_above_raw());
  const InstitutionRule rule(inst, kS, Variant::kPlain);
  const Contract a_obc = contract(inst, "a", "s", Category::kOBC);
  const Contract a_open = contract(inst, "a", "s", Category::kOpen);
  const Contract b_obc = contract(inst, "b", "s", Category::kOBC);
  const Contract c_open = contract(inst, "c", "s", Category::kOpen);
  const std::vector<Contract> base = {a_obc, c_open};

  EXPECT_FALSE(contains(rule(with(base, {b_obc})), b_obc));
  EXPECT_TRUE(contains(rule(with(base, {b_obc, a_open})), b_obc));

  // Same mechanism shrinks the chosen set.
  EXPECT_EQ(rule(base).size(), 2u);
  EXPECT_EQ(rule(with(base, {a_open})).size(), 1u);
}

// Substitutes and size monotonicity over observable offer sequences: each
// new offer comes from an individual not chosen before it arrives.
TEST(AggregateChoiceTest, ObservableSubstitutesAndSizeMonotonicity) {
  std::size_t checked = 0;
  for (std::uint64_t trial = 0; trial < 4000; ++trial) {
    Rng rng = Rng::derive(47, trial);
    const auto inst = random_instance(rng);
    const auto universe = build_contract_universe(inst);
    if (universe.size() < 2) continue;
    const auto base = random_subset(rng, universe);
    const Contract x = universe[rng.below(universe.size())];
    const Contract y = universe[rng.below(universe.size())];
    if (x == y) continue;
    for (Variant v : {Variant::kPlain, Variant::kTransfer}) {
      const InstitutionRule rule(inst, kS, v);
      const auto c_base = rule(with(base, {}));
      const auto c_x = rule(with(base, {x}));
      if (people_of(c_base).count(x.person) || people_of(c_x).count(y.person)) continue;
      ++checked;
      const auto c_xy = rule(with(base, {x, y}));
      if (!contains(c_x, x)) {
        EXPECT_FALSE(contains(c_xy, x)) << "substitutes, trial " << trial;
        EXPECT_EQ(c_x, c_base) << "irrelevance of rejected contracts, trial " << trial;
      }
      EXPECT_LE(c_base.size(), c_x.size()) << "size monotonicity, trial " << trial;
      EXPECT_LE(c_x.size(), c_xy.size()) << "size monotonicity, trial " << trial;
    }
  }
  EXPECT_GT(checked, 2000u);
}

}  // namespace
}  // namespace hres
