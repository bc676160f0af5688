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

// Hand-built instances shared by unit and acceptance tests.

#pragma once

#include <string>
#include <vector>

#include "hres/hres.hpp"

namespace hres::testing {

inline RawIndividual raw_person(std::string id, std::string membership,
                                std::vector<std::string> types,
                                std::vector<RawPreference> prefs) {
  return {std::move(id), std::move(membership), std::move(types), std::move(prefs)};
}

inline Contract contract(const Instance& instance, std::string_view who, std::string_view where,
                         Category c) {
  return {*instance.find_individual(who), *instance.find_institution(where), c};
}

// PwD example: capacity 4, PwD quota 2, blind (inside PwD) quota 1.
// Scores i1 90 (untyped), i2 80 {PwD}, i3 70 {PwD, blind}, i4 60 (untyped),
// i5 50 {PwD}.
struct PwdProblem {
  HierarchyForest forest = make_forest({{"PwD", std::nullopt}, {"blind", "PwD"}});
  std::vector<int> quotas;
  std::vector<Applicant> pool;
  int capacity = 4;

  PwdProblem() {
    const TypeIndex pwd = *forest.find("PwD");
    const TypeIndex blind = *forest.find("blind");
    quotas.assign(forest.size(), 0);
    quotas[pwd.value] = 2;
    quotas[blind.value] = 1;
    TypeSet p, pb;
    p.insert(pwd);
    pb.insert(pwd);
    pb.insert(blind);
    pool = {{person(0), 0, {}}, {person(1), 1, p}, {person(2), 2, pb}, {person(3), 3, {}},
            {person(4), 4, p}};
  }
};

inline RawInstance pwd_raw() {
  RawInstance raw;
  raw.horizontal_types = {{"PwD", std::nullopt}, {"blind", "PwD"}};
  RawInstitution s{"s", 4, {}, {{"o", {{"PwD", 2}, {"blind", 1}}}},
                   {{"i1", "90"}, {"i2", "80"}, {"i3", "70"}, {"i4", "60"}, {"i5", "50"}}};
  raw.institutions = {s};
  raw.individuals = {raw_person("i1", "g", {}, {{"s", "o"}}),
                     raw_person("i2", "g", {"PwD"}, {{"s", "o"}}),
                     raw_person("i3", "g", {"PwD", "blind"}, {{"s", "o"}}),
                     raw_person("i4", "g", {}, {{"s", "o"}}),
                     raw_person("i5", "g", {"PwD"}, {{"s", "o"}})};
  return raw;
}

// Two-individual, one-institution instance: one open seat and one OBC
// seat, i outranks j, both OBC members. `reserved_first` puts (s, OBC)
// ahead of (s, o) in both lists.
inline RawInstance two_seat_raw(bool reserved_first) {
  RawInstance raw;
  RawInstitution s{"s", 2, {{"OBC", 1}}, {}, {{"i", "90"}, {"j", "80"}}};
  raw.institutions = {s};
  std::vector<RawPreference> prefs = {{"s", "o"}, {"s", "OBC"}};
  if (reserved_first) std::swap(prefs[0], prefs[1]);
  raw.individuals = {raw_person("i", "OBC", {}, prefs), raw_person("j", "OBC", {}, prefs)};
  return raw;
}

// Over-and-above: one open and one OBC seat. a (OBC, 90) offers both
// contracts, b (OBC, 80) only the OBC one, c (general, 85) the open one.
inline RawInstance over_and_above_raw() {
  RawInstance raw;
  RawInstitution s{"s", 2, {{"OBC", 1}}, {}, {{"a", "90"}, {"b", "80"}, {"c", "85"}}};
  raw.institutions = {s};
  raw.individuals = {raw_person("a", "OBC", {}, {{"s", "o"}, {"s", "OBC"}}),
                     raw_person("b", "OBC", {}, {{"s", "OBC"}}),
                     raw_person("c", "g", {}, {{"s", "o"}})};
  return raw;
}

// Transfer: two OBC seats, no open seat. One OBC proposer k (80) and one
// general proposer g (95).
inline RawInstance transfer_raw() {
  RawInstance raw;
  RawInstitution s{"s", 2, {{"OBC", 2}}, {}, {{"g", "95"}, {"k", "80"}}};
  raw.institutions = {s};
  raw.individuals = {raw_person("g", "g", {}, {{"s", "o"}}),
                     raw_person("k", "OBC", {}, {{"s", "OBC"}})};
  return raw;
}

// Immediate acceptance is manipulable here: j tops a, i outranks k at b.
// Truthfully i loses a to j and finds b taken by k in round one.
inline RawInstance boston_raw() {
  RawInstance raw;
  RawInstitution a{"a", 1, {}, {}, {{"i", "80"}, {"j", "90"}, {"k", "70"}}};
  RawInstitution b{"b", 1, {}, {}, {{"i", "90"}, {"j", "80"}, {"k", "70"}}};
  raw.institutions = {a, b};
  raw.individuals = {raw_person("i", "g", {}, {{"a", "o"}, {"b", "o"}}),
                     raw_person("j", "g", {}, {{"a", "o"}, {"b", "o"}}),
                     raw_person("k", "g", {}, {{"b", "o"}})};
  return raw;
}

}  // namespace hres::testing
