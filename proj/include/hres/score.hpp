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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hres {

/// Exact decimal merit score. Scores are compared digit-wise so that no two
/// textually different values collapse through floating point.
class Score {
 public:
  Score() = default;

  /// Accepts `-?[0-9]+(\.[0-9]+)?`.
  static std::optional<Score> parse(std::string_view text) {
    Score s;
    std::size_t pos = 0;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
      s.negative_ = text[pos] == '-';
      ++pos;
    }
    const std::size_t int_begin = pos;
    while (pos < text.size() && is_digit(text[pos])) ++pos;
    if (pos == int_begin) return std::nullopt;
    std::string_view integer = text.substr(int_begin, pos - int_begin);
    std::string_view fraction;
    if (pos < text.size() && text[pos] == '.') {
      const std::size_t frac_begin = ++pos;
      while (pos < text.size() && is_digit(text[pos])) ++pos;
      if (pos == frac_begin) return std::nullopt;
      fraction = text.substr(frac_begin, pos - frac_begin);
    }
    if (pos != text.size()) return std::nullopt;

    while (integer.size() > 1 && integer.front() == '0') integer.remove_prefix(1);
    while (!fraction.empty() && fraction.back() == '0') fraction.remove_suffix(1);
    s.integer_ = std::string{integer};
    s.fraction_ = std::string{fraction};
    if (s.integer_ == "0" && s.fraction_.empty()) s.negative_ = false;
    return s;
  }

  static Score from_integer(std::int64_t value) {
    return *parse(std::to_string(value));
  }

  bool is_integer() const { return fraction_.empty(); }

  /// Canonical text: no leading integer zeros, no trailing fraction zeros.
  std::string text() const {
    std::string out = negative_ ? "-" : "";
    out += integer_;
    if (!fraction_.empty()) out += "." + fraction_;
    return out;
  }

  std::strong_ordering operator<=>(const Score& other) const {
    if (negative_ != other.negative_) {
      return negative_ ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    const auto magnitude = compare_magnitude(other);
    return negative_ ? 0 <=> magnitude : magnitude <=> 0;
  }

  bool operator==(const Score& other) const = default;

 private:
  static constexpr bool is_digit(char c) { return c >= '0' && c <= '9'; }

  int compare_magnitude(const Score& other) const {
    if (integer_.size() != other.integer_.size()) {
      return integer_.size() < other.integer_.size() ? -1 : 1;
    }
    if (const int c = integer_.compare(other.integer_); c != 0) return c < 0 ? -1 : 1;
    // Trailing zeros are stripped, so plain lexicographic order is numeric.
    if (const int c = fraction_.compare(other.fraction_); c != 0) return c < 0 ? -1 : 1;
    return 0;
  }

  bool negative_ = false;
  std::string integer_ = "0";
  std::string fraction_;
};

}  // namespace hres
