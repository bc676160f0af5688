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

#include "hres/generate.hpp"
#include "hres/instance.hpp"
#include "support/fixtures.hpp"

namespace hres {
namespace {

using testing::raw_person;

std::vector<IssueCode> codes(const ValidationResult& r) {
  std::vector<IssueCode> out;
  for (const auto& e : r.errors) out.push_back(e.code);
  return out;
}

RawInstance one_institution(long long total, std::map<std::string, long long> vertical) {
  RawInstance raw;
  raw.institutions = {{"s", total, std::move(vertical), {}, {}}};
  return raw;
}

TEST(ValidateInstanceTest, OpenCapacityIsTheResidual) {
  const auto inst = make_instance(
      one_institution(10, {{"SC", 2}, {"ST", 1}, {"OBC", 3}, {"EWS", 1}}));
  const auto& s = inst.institution(institution(0));
  EXPECT_EQ(s.capacity[slot_of(Category::kOpen)], 3);
  EXPECT_EQ(s.capacity[slot_of(Category::kOBC)], 3);
  EXPECT_EQ(s.total_capacity, 10);
}

TEST(ValidateInstanceTest, ReservedSeatsBeyondTotalOverflow) {
  const auto r = validate_instance(one_institution(3, {{"SC", 2}, {"OBC", 2}}), {});
  EXPECT_EQ(codes(r), std::vector<IssueCode>{IssueCode::kCapacityOverflow});
  EXPECT_EQ(r.errors[0].path, "institutions[0].vertical_capacities");
}

TEST(ValidateInstanceTest, EmptyInstanceIsValid) {
  const auto r = validate_instance(RawInstance{}, {});
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.instance->individual_count(), 0u);
  EXPECT_EQ(r.instance->institution_count(), 0u);
  EXPECT_TRUE(build_contract_universe(*r.instance).empty());
}

TEST(ValidateInstanceTest, GeneralMemberListingReservedCategoryIsIneligible) {
  RawInstance raw = one_institution(2, {{"OBC", 1}});
  raw.individuals = {raw_person("g1", "g", {}, {{"s", "OBC"}})};
  raw.institutions[0].merit_scores = {{"g1", "50"}};
  const auto r = validate_instance(raw, {});
  EXPECT_EQ(codes(r), std::vector<IssueCode>{IssueCode::kIneligiblePreference});
  EXPECT_EQ(r.errors[0].path, "individuals[0].preferences[0]");
}

TEST(ValidateInstanceTest, MemberListingAnotherReservedCategoryIsIneligible) {
  RawInstance raw = one_institution(2, {{"SC", 1}});
  raw.individuals = {raw_person("a", "OBC", {}, {{"s", "SC"}})};
  raw.institutions[0].merit_scores = {{"a", "50"}};
  EXPECT_EQ(codes(validate_instance(raw, {})),
            std::vector<IssueCode>{IssueCode::kIneligiblePreference});
}

TEST(ValidateInstanceTest, CollectsEveryProblemAtOnce) {
  RawInstance raw = one_institution(1, {});
  raw.individuals = {raw_person("a", "g", {}, {{"s", "o"}, {"s", "o"}, {"t", "o"}}),
                     raw_person("b", "xx", {}, {{"s", "Q"}})};
  raw.institutions[0].merit_scores = {{"a", "50"}, {"zz", "40"}};
  const auto r = validate_instance(raw, {});
  const auto got = codes(r);
  for (IssueCode c : {IssueCode::kDuplicatePreference, IssueCode::kUnknownInstitution,
                      IssueCode::kUnknownCategory, IssueCode::kUnknownIndividual,
                      IssueCode::kMissingScore}) {
    EXPECT_NE(std::find(got.begin(), got.end(), c), got.end()) << to_string(c);
  }
  EXPECT_FALSE(r.instance.has_value());
}

TEST(ValidateInstanceTest, ScoreTiesAreErrorsUnlessBrokenById) {
  RawInstance raw = one_institution(1, {});
  raw.individuals = {raw_person("b", "g", {}, {}), raw_person("a", "g", {}, {})};
  raw.institutions[0].merit_scores = {{"a", "70.0"}, {"b", "70"}};
  EXPECT_EQ(codes(validate_instance(raw, {})), std::vector<IssueCode>{IssueCode::kScoreTie});

  const auto r = validate_instance(raw, {.tiebreak_by_id = true});
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.notes.size(), 1u);
  EXPECT_EQ(r.notes[0].code, IssueCode::kTieBroken);
  const auto& inst = *r.instance;
  EXPECT_EQ(merit_compare(inst, institution(0), *inst.find_individual("a"),
                          *inst.find_individual("b")),
            MeritOrder::kFirst);
}

TEST(ValidateInstanceTest, RejectsDuplicatesNegativesAndBadScores) {
  RawInstance raw = one_institution(-1, {{"OBC", -2}, {"o", 1}});
  raw.institutions.push_back(raw.institutions[0]);
  raw.individuals = {raw_person("a", "g", {}, {}), raw_person("a", "g", {}, {})};
  raw.institutions[0].merit_scores = {{"a", "x9"}};
  raw.schema_version = 7;
  const auto got = codes(validate_instance(raw, {}));
  for (IssueCode c : {IssueCode::kDuplicateId, IssueCode::kNegativeValue, IssueCode::kBadScore,
                      IssueCode::kSchemaVersion, IssueCode::kUnknownCategory}) {
    EXPECT_NE(std::find(got.begin(), got.end(), c), got.end()) << to_string(c);
  }
}

TEST(ValidateInstanceTest, HierarchyViolationsAreDelegated) {
  RawInstance raw = testing::pwd_raw();
  raw.individuals[2].horizontal_types = {"blind"};
  EXPECT_EQ(codes(validate_instance(raw, {})),
            std::vector<IssueCode>{IssueCode::kHierarchyViolation});
}

TEST(ValidateInstanceTest, OverDemandingQuotasOnlyWarn) {
  RawInstance raw = testing::pwd_raw();
  raw.institutions[0].total_capacity = 1;
  const auto r = validate_instance(raw, {});
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0].code, IssueCode::kQuotaExceedsCapacity);
}

TEST(RequiredSeatsTest, ParentsAbsorbChildren) {
  const auto f = make_forest({{"b", std::nullopt}, {"a", "b"}, {"c", std::nullopt}});
  std::vector<int> q(3, 0);
  q[f.find("a")->value] = 1;
  q[f.find("b")->value] = 2;
  q[f.find("c")->value] = 1;
  EXPECT_EQ(required_seats(f, q), 3);
  q[f.find("a")->value] = 3;
  EXPECT_EQ(required_seats(f, q), 4);
}

TEST(ContractUniverseTest, SizesFollowEligibility) {
  RawInstance raw;
  raw.institutions = {{"a", 1, {}, {}, {{"g1", "1"}, {"r1", "2"}}},
                      {"b", 1, {}, {}, {{"g1", "1"}, {"r1", "2"}}}};
  raw.individuals = {raw_person("g1", "g", {}, {{"b", "o"}}),
                     raw_person("r1", "OBC", {}, {{"a", "OBC"}})};
  const auto inst = make_instance(raw);
  const auto all = build_contract_universe(inst);
  EXPECT_EQ(all.size(), 2u + 4u);
  std::size_t obc = 0;
  for (const auto& c : all) {
    if (c.person == *inst.find_individual("r1")) ++obc;
    if (c.person == *inst.find_individual("g1")) {
      EXPECT_EQ(c.category, Category::kOpen);
    }
  }
  EXPECT_EQ(obc, 4u);
  const auto acceptable = build_contract_universe(inst, UniverseScope::kAcceptable);
  EXPECT_EQ(acceptable.size(), 2u);
}

TEST(ContractUniverseTest, WithheldMembershipGivesOpenContractsOnly) {
  RawInstance raw;
  raw.institutions = {{"a", 1, {{"OBC", 1}}, {}, {{"x", "1"}}},
                      {"b", 1, {}, {}, {{"x", "1"}}}};
  raw.individuals = {raw_person("x", "g", {}, {})};
  const auto all = build_contract_universe(make_instance(raw));
  ASSERT_EQ(all.size(), 2u);
  for (const auto& c : all) EXPECT_EQ(c.category, Category::kOpen);
}

TEST(ContractUniverseTest, SizeFormulaOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    GenParams p;
    p.individuals = 12;
    p.institutions = 3;
    const auto inst = generate_instance(seed, p);
    std::size_t expected = 0;
    for (const auto& i : inst.individuals()) {
      expected += inst.institution_count() * (i.membership == Membership::kGeneral ? 1 : 2);
      for (const auto& slot : i.preferences) {
        EXPECT_TRUE(eligible(i.membership, slot.category));
      }
    }
    EXPECT_EQ(build_contract_universe(inst).size(), expected);
  }
}

TEST(MeritCompareTest, OrdersByScore) {
  const auto inst = make_instance(testing::pwd_raw());
  const auto s = institution(0);
  EXPECT_EQ(merit_compare(inst, s, person(0), person(1)), MeritOrder::kFirst);
  EXPECT_EQ(merit_compare(inst, s, person(4), person(1)), MeritOrder::kSecond);
  EXPECT_THROW(merit_compare(inst, s, person(2), person(2)), Error);
  EXPECT_THROW(merit_compare(inst, s, person(2), person(9)), Error);
}

TEST(MeritCompareTest, StrictTotalOrderOnRandomTriples) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    GenParams p;
    p.individuals = 7;
    p.institutions = 2;
    const auto inst = generate_instance(seed, p);
    for (std::size_t s = 0; s < inst.institution_count(); ++s) {
      for (std::size_t a = 0; a < 7; ++a) {
        for (std::size_t b = 0; b < 7; ++b) {
          if (a == b) continue;
          const auto ab = merit_compare(inst, institution(s), person(a), person(b));
          const auto ba = merit_compare(inst, institution(s), person(b), person(a));
          EXPECT_NE(ab, ba);
          for (std::size_t c = 0; c < 7; ++c) {
            if (c == a || c == b) continue;
            if (ab == MeritOrder::kFirst &&
                merit_compare(inst, institution(s), person(b), person(c)) == MeritOrder::kFirst) {
              EXPECT_EQ(merit_compare(inst, institution(s), person(a), person(c)),
                        MeritOrder::kFirst);
            }
          }
        }
      }
    }
  }
}

TEST(MeritCompareTest, CategoryRankingExcludesNonMembers) {
  const auto inst = make_instance(testing::over_and_above_raw());
  const auto s = institution(0);
  const auto c = *inst.find_individual("c");
  const auto a = *inst.find_individual("a");
  EXPECT_FALSE(category_rank(inst, s, Category::kOBC, c).has_value());
  EXPECT_TRUE(category_rank(inst, s, Category::kOBC, a).has_value());
  EXPECT_TRUE(category_rank(inst, s, Category::kOpen, c).has_value());
}

TEST(InstanceTest, DefinitionOneHoldsOnRealizedPopulations) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GenParams p;
    p.individuals = 20;
    p.horizontal_types = 5;
    p.max_depth = 3;
    p.typed_percent = 80;
    const auto inst = generate_instance(seed, p);
    const auto& f = inst.forest();
    for (std::size_t a = 0; a < f.size(); ++a) {
      for (std::size_t b = a + 1; b < f.size(); ++b) {
        bool meet = false;
        for (const auto& i : inst.individuals()) {
          meet = meet || (i.types.contains(type(a)) && i.types.contains(type(b)));
        }
        if (meet) {
          EXPECT_TRUE(f.comparable(type(a), type(b)));
        }
      }
    }
  }
}

TEST(InstanceTest, RawRoundTripAndProfileSwap) {
  const auto inst = make_instance(testing::over_and_above_raw());
  EXPECT_EQ(make_instance(inst.to_raw()), inst);
  Profile empty(inst.individual_count());
  const auto swapped = inst.with_profile(empty);
  EXPECT_TRUE(swapped.individual(person(0)).preferences.empty());
  EXPECT_EQ(swapped.profile(), empty);
  EXPECT_EQ(inst.profile()[0].size(), 2u);
}

TEST(MatchingTest, WeakFeasibilityAndViews) {
  const auto inst = make_instance(testing::two_seat_raw(false));
  const auto x1 = testing::contract(inst, "i", "s", Category::kOpen);
  const auto x2 = testing::contract(inst, "i", "s", Category::kOBC);
  const auto y1 = testing::contract(inst, "j", "s", Category::kOpen);
  EXPECT_TRUE(Matching({x1, y1}).weakly_feasible(inst));
  EXPECT_FALSE(Matching({x1, x2}).weakly_feasible(inst));
  const Matching m({y1, x1, y1});
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.of_individual(person(0)), std::vector<Contract>{x1});
  EXPECT_EQ(m.at_institution(institution(0)).size(), 2u);
  EXPECT_TRUE(m.contains(y1));
  EXPECT_FALSE(m.contains(x2));
}

TEST(PreferenceTest, OutsideOptionSemantics) {
  const PreferenceList list = {{institution(0), Category::kOBC}, {institution(0), Category::kOpen}};
  const Slot obc{institution(0), Category::kOBC};
  const Slot open{institution(0), Category::kOpen};
  const Slot other{institution(1), Category::kOpen};
  EXPECT_TRUE(strictly_prefers(list, obc, open));
  EXPECT_FALSE(strictly_prefers(list, open, obc));
  EXPECT_FALSE(strictly_prefers(list, obc, obc));
  EXPECT_TRUE(strictly_prefers(list, open, std::nullopt));
  EXPECT_FALSE(strictly_prefers(list, other, std::nullopt));
  EXPECT_TRUE(strictly_prefers(list, open, other));
}

}  // namespace
}  // namespace hres
