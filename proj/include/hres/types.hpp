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

#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hres {

/// Dense, strongly typed index into one of the instance tables.
template <class Tag>
struct Index {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const Index&) const = default;
};

using PersonIndex = Index<struct PersonTag>;
using InstitutionIndex = Index<struct InstitutionTag>;
using TypeIndex = Index<struct TypeTag>;

template <class Tag>
constexpr Index<Tag> make_index(std::size_t i) {
  return Index<Tag>{static_cast<std::uint32_t>(i)};
}

inline PersonIndex person(std::size_t i) { return make_index<PersonTag>(i); }
inline InstitutionIndex institution(std::size_t i) {
  return make_index<InstitutionTag>(i);
}
inline TypeIndex type(std::size_t i) { return make_index<TypeTag>(i); }

// ---------------------------------------------------------------------------
// Vertical categories

/// Position categories. kDereserved is the pseudo-category holding vacant
/// OBC seats under forward transfer; it never appears in an individual's
/// membership or preference list.
enum class Category : std::uint8_t { kOpen, kSC, kST, kOBC, kEWS, kDereserved };

inline constexpr std::size_t kVerticalCategoryCount = 5;

template <class T>
using CategoryArray = std::array<T, kVerticalCategoryCount>;

inline constexpr std::array<Category, kVerticalCategoryCount> kVerticalCategories{
    Category::kOpen, Category::kSC, Category::kST, Category::kOBC, Category::kEWS};

constexpr std::size_t slot_of(Category c) { return static_cast<std::size_t>(c); }

constexpr std::string_view to_string(Category c) {
  switch (c) {
    case Category::kOpen: return "o";
    case Category::kSC: return "SC";
    case Category::kST: return "ST";
    case Category::kOBC: return "OBC";
    case Category::kEWS: return "EWS";
    case Category::kDereserved: return "D";
  }
  return "?";
}

inline std::optional<Category> parse_category(std::string_view text) {
  if (text == "o" || text == "open") return Category::kOpen;
  if (text == "SC") return Category::kSC;
  if (text == "ST") return Category::kST;
  if (text == "OBC") return Category::kOBC;
  if (text == "EWS") return Category::kEWS;
  if (text == "D") return Category::kDereserved;
  return std::nullopt;
}

/// Declared vertical membership; kGeneral also models a reserved-category
/// member who withholds membership.
enum class Membership : std::uint8_t { kGeneral, kSC, kST, kOBC, kEWS };

constexpr std::string_view to_string(Membership m) {
  switch (m) {
    case Membership::kGeneral: return "g";
    case Membership::kSC: return "SC";
    case Membership::kST: return "ST";
    case Membership::kOBC: return "OBC";
    case Membership::kEWS: return "EWS";
  }
  return "?";
}

inline std::optional<Membership> parse_membership(std::string_view text) {
  if (text == "g" || text == "general") return Membership::kGeneral;
  if (text == "SC") return Membership::kSC;
  if (text == "ST") return Membership::kST;
  if (text == "OBC") return Membership::kOBC;
  if (text == "EWS") return Membership::kEWS;
  return std::nullopt;
}

constexpr std::optional<Category> reserved_category(Membership m) {
  switch (m) {
    case Membership::kGeneral: return std::nullopt;
    case Membership::kSC: return Category::kSC;
    case Membership::kST: return Category::kST;
    case Membership::kOBC: return Category::kOBC;
    case Membership::kEWS: return Category::kEWS;
  }
  return std::nullopt;
}

/// Eligibility table: everyone may hold open seats, members of r may also
/// hold r seats.
constexpr bool eligible(Membership m, Category c) {
  if (c == Category::kOpen) return true;
  if (c == Category::kDereserved) return false;
  return reserved_category(m) == c;
}

// ---------------------------------------------------------------------------
// Horizontal type sets

inline constexpr std::size_t kMaxHorizontalTypes = 64;

/// A set of horizontal types, stored as a bitmask over forest indices.
class TypeSet {
 public:
  constexpr TypeSet() = default;
  constexpr explicit TypeSet(std::uint64_t bits) : bits_(bits) {}

  constexpr bool contains(TypeIndex t) const {
    return t.value < 64 && ((bits_ >> t.value) & 1U) != 0;
  }
  constexpr void insert(TypeIndex t) { bits_ |= std::uint64_t{1} << t.value; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const {
    return static_cast<std::size_t>(std::popcount(bits_));
  }
  constexpr bool is_superset_of(TypeSet other) const {
    return (other.bits_ & ~bits_) == 0;
  }
  constexpr TypeSet minus(TypeSet other) const { return TypeSet{bits_ & ~other.bits_}; }
  constexpr TypeSet intersect(TypeSet other) const { return TypeSet{bits_ & other.bits_}; }
  constexpr TypeSet unite(TypeSet other) const { return TypeSet{bits_ | other.bits_}; }
  constexpr std::uint64_t bits() const { return bits_; }

  std::vector<TypeIndex> members() const {
    std::vector<TypeIndex> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
      out.push_back(type(static_cast<std::size_t>(std::countr_zero(b))));
    }
    return out;
  }

  constexpr auto operator<=>(const TypeSet&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

// ---------------------------------------------------------------------------
// Errors

enum class IssueCode : std::uint8_t {
  kCapacityOverflow,
  kIneligiblePreference,
  kDuplicatePreference,
  kScoreTie,
  kMissingScore,
  kBadScore,
  kHierarchyViolation,
  kCycle,
  kUnknownType,
  kTooManyTypes,
  kDuplicateId,
  kUnknownInstitution,
  kUnknownIndividual,
  kIdenticalIndividuals,
  kUnknownCategory,
  kNegativeValue,
  kSchemaVersion,
  kQuotaIndexMismatch,
  kForeignContract,
  kIneligibleContract,
  kMixedIndividualState,
  kNonterminationGuard,
  kMalformedLog,
  kSizeMismatch,
  kSizeTooLarge,
  kInstanceTooLargeForExhaustive,
  kEnumerationCapExceeded,
  kBadParams,
  kParseError,
  kIoError,
  // Non-fatal.
  kQuotaExceedsCapacity,
  kTieBroken,
};

constexpr std::string_view to_string(IssueCode code) {
  switch (code) {
    case IssueCode::kCapacityOverflow: return "CAPACITY_OVERFLOW";
    case IssueCode::kIneligiblePreference: return "INELIGIBLE_PREFERENCE";
    case IssueCode::kDuplicatePreference: return "DUPLICATE_PREFERENCE";
    case IssueCode::kScoreTie: return "SCORE_TIE";
    case IssueCode::kMissingScore: return "MISSING_SCORE";
    case IssueCode::kBadScore: return "BAD_SCORE";
    case IssueCode::kHierarchyViolation: return "HIERARCHY_VIOLATION";
    case IssueCode::kCycle: return "CYCLE";
    case IssueCode::kUnknownType: return "UNKNOWN_TYPE";
    case IssueCode::kTooManyTypes: return "TOO_MANY_TYPES";
    case IssueCode::kDuplicateId: return "DUPLICATE_ID";
    case IssueCode::kUnknownInstitution: return "UNKNOWN_INSTITUTION";
    case IssueCode::kUnknownIndividual: return "UNKNOWN_INDIVIDUAL";
    case IssueCode::kIdenticalIndividuals: return "IDENTICAL_INDIVIDUALS";
    case IssueCode::kUnknownCategory: return "UNKNOWN_CATEGORY";
    case IssueCode::kNegativeValue: return "NEGATIVE_VALUE";
    case IssueCode::kSchemaVersion: return "SCHEMA_VERSION";
    case IssueCode::kQuotaIndexMismatch: return "QUOTA_INDEX_MISMATCH";
    case IssueCode::kForeignContract: return "FOREIGN_CONTRACT";
    case IssueCode::kIneligibleContract: return "INELIGIBLE_CONTRACT";
    case IssueCode::kMixedIndividualState: return "MIXED_INDIVIDUAL_STATE";
    case IssueCode::kNonterminationGuard: return "NONTERMINATION_GUARD";
    case IssueCode::kMalformedLog: return "MALFORMED_LOG";
    case IssueCode::kSizeMismatch: return "SIZE_MISMATCH";
    case IssueCode::kSizeTooLarge: return "SIZE_TOO_LARGE";
    case IssueCode::kInstanceTooLargeForExhaustive: return "INSTANCE_TOO_LARGE_FOR_EXHAUSTIVE";
    case IssueCode::kEnumerationCapExceeded: return "ENUMERATION_CAP_EXCEEDED";
    case IssueCode::kBadParams: return "BAD_PARAMS";
    case IssueCode::kParseError: return "PARSE_ERROR";
    case IssueCode::kIoError: return "IO_ERROR";
    case IssueCode::kQuotaExceedsCapacity: return "QUOTA_EXCEEDS_CAPACITY";
    case IssueCode::kTieBroken: return "TIE_BROKEN";
  }
  return "UNKNOWN";
}

/// One validation finding: a machine-readable code, the location inside
/// the input document, and a human message.
struct Issue {
  IssueCode code;
  std::string path;
  std::string message;

  bool operator==(const Issue&) const = default;
};

inline std::string format_issue(const Issue& issue) {
  std::string out{to_string(issue.code)};
  if (!issue.path.empty()) out += " at " + issue.path;
  out += ": " + issue.message;
  return out;
}

/// Contract violations by callers (bad indices, oversize oracle requests,
/// engine invariants) are reported by throwing Error.
class Error : public std::runtime_error {
 public:
  Error(IssueCode code, const std::string& message)
      : std::runtime_error(std::string{to_string(code)} + ": " + message), code_(code) {}

  IssueCode code() const noexcept { return code_; }

 private:
  IssueCode code_;
};

}  // namespace hres
