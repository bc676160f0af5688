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

// Laminar containment forest over horizontal types.
//
// The forest is declared structurally: each type names at most one parent
// that contains it. An individual's type set must then be a root path, i.e.
// upward closed and totally ordered by containment. Any realized population
// built from root paths is laminar, so validity never depends on who applies.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hres/types.hpp"

namespace hres {

struct TypeDeclaration {
  std::string id;
  std::optional<std::string> parent;

  bool operator==(const TypeDeclaration&) const = default;
};

/// Raw ρ(i) for one individual, as named in the input.
struct TypeMembership {
  std::string individual;
  std::vector<std::string> types;
};

/// Levels H^1, H^2, ...: H^1 holds the leaves, each later level the leaves
/// left after removing every earlier level.
using PeelLevels = std::vector<std::vector<TypeIndex>>;

class HierarchyForest {
 public:
  HierarchyForest() = default;

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  /// Types are indexed in ascending id order.
  const std::string& id(TypeIndex t) const { return ids_.at(t.value); }
  const std::vector<std::string>& ids() const { return ids_; }

  std::optional<TypeIndex> find(std::string_view id) const {
    const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) return std::nullopt;
    return type(static_cast<std::size_t>(it - ids_.begin()));
  }

  std::optional<TypeIndex> parent(TypeIndex t) const {
    check(t);
    return parents_[t.value];
  }
  std::span<const TypeIndex> children(TypeIndex t) const {
    check(t);
    return children_[t.value];
  }
  std::span<const TypeIndex> roots() const { return roots_; }

  /// Parent chain of t, nearest first; empty for roots.
  std::span<const TypeIndex> ancestors(TypeIndex t) const {
    check(t);
    return ancestors_[t.value];
  }

  /// Number of types on the path from t up to its root, t included.
  std::size_t depth(TypeIndex t) const { return ancestors(t).size() + 1; }

  /// t together with all of its ancestors.
  TypeSet closure(TypeIndex t) const {
    TypeSet s;
    s.insert(t);
    for (TypeIndex a : ancestors(t)) s.insert(a);
    return s;
  }

  bool is_ancestor_or_self(TypeIndex ancestor, TypeIndex t) const {
    return closure(t).contains(ancestor);
  }
  bool comparable(TypeIndex a, TypeIndex b) const {
    return is_ancestor_or_self(a, b) || is_ancestor_or_self(b, a);
  }

  /// True iff `types` is exactly the closure of one type (or empty).
  bool is_root_path(TypeSet types) const {
    if (types.empty()) return true;
    if (size() < 64 && (types.bits() >> size()) != 0) return false;
    const auto members = types.members();
    const TypeIndex deepest = *std::max_element(
        members.begin(), members.end(),
        [&](TypeIndex a, TypeIndex b) { return depth(a) < depth(b); });
    return closure(deepest) == types;
  }

  const PeelLevels& levels() const { return levels_; }

  std::vector<TypeDeclaration> declarations() const {
    std::vector<TypeDeclaration> out;
    for (std::size_t i = 0; i < size(); ++i) {
      TypeDeclaration d{ids_[i], std::nullopt};
      if (parents_[i]) d.parent = ids_[parents_[i]->value];
      out.push_back(std::move(d));
    }
    return out;
  }

  bool operator==(const HierarchyForest& other) const {
    return ids_ == other.ids_ && parents_ == other.parents_;
  }

 private:
  friend struct ForestBuilder;

  void check(TypeIndex t) const {
    if (t.value >= size()) {
      throw Error(IssueCode::kUnknownType, "type index " + std::to_string(t.value));
    }
  }

  std::vector<std::string> ids_;
  std::vector<std::optional<TypeIndex>> parents_;
  std::vector<std::vector<TypeIndex>> children_;
  std::vector<std::vector<TypeIndex>> ancestors_;
  std::vector<TypeIndex> roots_;
  PeelLevels levels_;
};

struct ForestResult {
  std::optional<HierarchyForest> forest;
  /// Resolved type set per membership entry, aligned with the input.
  std::vector<TypeSet> member_types;
  std::vector<Issue> errors;

  bool ok() const { return errors.empty(); }
};

struct ForestBuilder {
  static ForestResult build(std::span<const TypeDeclaration> declarations,
                            std::span<const TypeMembership> memberships) {
    ForestResult result;
    auto& errors = result.errors;

    std::vector<TypeDeclaration> decls(declarations.begin(), declarations.end());
    std::sort(decls.begin(), decls.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < decls.size(); ++i) {
      if (decls[i].id == decls[i - 1].id) {
        errors.push_back({IssueCode::kDuplicateId, "horizontal_types",
                          "horizontal type '" + decls[i].id + "' declared twice"});
      }
    }
    if (decls.size() > kMaxHorizontalTypes) {
      errors.push_back({IssueCode::kTooManyTypes, "horizontal_types",
                        std::to_string(decls.size()) + " types declared, at most " +
                            std::to_string(kMaxHorizontalTypes) + " supported"});
    }
    if (!errors.empty()) return result;

    HierarchyForest f;
    const std::size_t n = decls.size();
    for (const auto& d : decls) f.ids_.push_back(d.id);
    f.parents_.assign(n, std::nullopt);
    f.children_.assign(n, {});
    f.ancestors_.assign(n, {});

    for (std::size_t i = 0; i < n; ++i) {
      if (!decls[i].parent) continue;
      const auto p = f.find(*decls[i].parent);
      if (!p) {
        errors.push_back({IssueCode::kUnknownType, "horizontal_types." + decls[i].id,
                          "parent '" + *decls[i].parent + "' is not declared"});
        continue;
      }
      f.parents_[i] = *p;
    }
    if (!errors.empty()) return result;

    // Walk each parent chain; revisiting the start type means a cycle.
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<bool> seen(n, false);
      seen[i] = true;
      for (auto p = f.parents_[i]; p; p = f.parents_[p->value]) {
        if (seen[p->value]) {
          errors.push_back({IssueCode::kCycle, "horizontal_types." + f.ids_[i],
                            "parent chain of '" + f.ids_[i] + "' loops back through '" +
                                f.ids_[p->value] + "'"});
          break;
        }
        seen[p->value] = true;
        f.ancestors_[i].push_back(*p);
      }
    }
    if (!errors.empty()) return result;

    for (std::size_t i = 0; i < n; ++i) {
      if (f.parents_[i]) {
        f.children_[f.parents_[i]->value].push_back(type(i));
      } else {
        f.roots_.push_back(type(i));
      }
    }

    // Level of a type is its height: leaves are 1, a parent sits one above
    // its tallest child.
    std::vector<std::size_t> height(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t h = 1;
      for (TypeIndex a : f.ancestors_[i]) {
        ++h;
        height[a.value] = std::max(height[a.value], h);
      }
    }
    const std::size_t max_height =
        n == 0 ? 0 : *std::max_element(height.begin(), height.end());
    f.levels_.assign(max_height, {});
    for (std::size_t i = 0; i < n; ++i) f.levels_[height[i] - 1].push_back(type(i));

    result.member_types.reserve(memberships.size());
    for (const auto& m : memberships) {
      TypeSet set;
      bool known = true;
      for (const auto& name : m.types) {
        const auto t = f.find(name);
        if (!t) {
          errors.push_back({IssueCode::kUnknownType, "individuals." + m.individual,
                            "horizontal type '" + name + "' is not declared"});
          known = false;
          continue;
        }
        set.insert(*t);
      }
      result.member_types.push_back(set);
      if (!known) continue;
      if (auto issue = root_path_issue(f, m.individual, set)) errors.push_back(*issue);
    }

    if (errors.empty()) result.forest = std::move(f);
    return result;
  }

  static std::optional<Issue> root_path_issue(const HierarchyForest& f,
                                              const std::string& individual,
                                              TypeSet set) {
    const auto members = set.members();
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        if (!f.comparable(members[a], members[b])) {
          return Issue{IssueCode::kHierarchyViolation, "individuals." + individual,
                       "types '" + f.id(members[a]) + "' and '" + f.id(members[b]) +
                           "' are not nested"};
        }
      }
    }
    for (TypeIndex t : members) {
      const auto p = f.parent(t);
      if (p && !set.contains(*p)) {
        return Issue{IssueCode::kHierarchyViolation, "individuals." + individual,
                     "type '" + f.id(t) + "' requires containing type '" + f.id(*p) + "'"};
      }
    }
    return std::nullopt;
  }
};

inline ForestResult build_forest(std::span<const TypeDeclaration> declarations,
                                 std::span<const TypeMembership> memberships = {}) {
  return ForestBuilder::build(declarations, memberships);
}

inline const PeelLevels& peel_levels(const HierarchyForest& forest) { return forest.levels(); }

inline std::vector<TypeIndex> ancestors(const HierarchyForest& forest, TypeIndex t) {
  const auto chain = forest.ancestors(t);
  return {chain.begin(), chain.end()};
}

inline std::vector<TypeIndex> ancestors(const HierarchyForest& forest, std::string_view id) {
  const auto t = forest.find(id);
  if (!t) throw Error(IssueCode::kUnknownType, "horizontal type '" + std::string{id} + "'");
  return ancestors(forest, *t);
}

/// Builds a forest from (id, parent) pairs and throws on any error. Handy
/// for fixtures and generators whose declarations are known to be valid.
inline HierarchyForest make_forest(std::span<const TypeDeclaration> declarations) {
  auto result = build_forest(declarations);
  if (!result.ok()) {
    throw Error(result.errors.front().code, result.errors.front().message);
  }
  return std::move(*result.forest);
}

inline HierarchyForest make_forest(std::initializer_list<TypeDeclaration> declarations) {
  return make_forest(std::span<const TypeDeclaration>(declarations.begin(), declarations.size()));
}

/// Resolves type names against a forest; throws UNKNOWN_TYPE.
inline TypeSet type_set(const HierarchyForest& forest, std::initializer_list<std::string_view> names) {
  TypeSet s;
  for (auto name : names) {
    const auto t = forest.find(name);
    if (!t) throw Error(IssueCode::kUnknownType, std::string{name});
    s.insert(*t);
  }
  return s;
}

}  // namespace hres
