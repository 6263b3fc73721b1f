#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "deltamap/rational.hpp"

namespace deltamap {

/// A full labelling x of the sites 1..n; entry i-1 holds the label of site i.
using Assignment = std::vector<int>;

/// A subset of sites, stored as a strictly increasing list of 1-based site
/// indices. The empty hypersite is valid and stands for the total-sum margin.
class Hypersite {
 public:
  Hypersite() = default;
  Hypersite(std::initializer_list<int> sites);
  explicit Hypersite(std::vector<int> sites);

  /// Sorts the input first; duplicates are still rejected.
  static Hypersite from_unsorted(std::vector<int> sites);

  const std::vector<int>& sites() const noexcept { return sites_; }
  std::size_t size() const noexcept { return sites_.size(); }
  bool empty() const noexcept { return sites_.empty(); }
  int operator[](std::size_t k) const { return sites_[k]; }

  bool contains(int site) const;
  /// Position of `site` inside the scope, or npos.
  std::size_t position(int site) const;
  bool is_subset_of(const Hypersite& other) const;
  bool is_strict_subset_of(const Hypersite& other) const {
    return size() < other.size() && is_subset_of(other);
  }

  Hypersite intersect(const Hypersite& other) const;
  Hypersite unite(const Hypersite& other) const;
  Hypersite minus(const Hypersite& other) const;

  /// Lexicographic order on the site lists.
  auto operator<=>(const Hypersite&) const = default;
  bool operator==(const Hypersite&) const = default;

  std::string to_string() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<int> sites_;
};

/// L^arity, throwing SizeError when it does not fit comfortably in memory.
std::size_t table_size(int labels, std::size_t arity);

/// Little-endian index: sum_k local[k] * L^k.
std::size_t encode_local(std::span<const int> local, int labels);
std::vector<int> decode_local(std::size_t index, std::size_t arity, int labels);

/// Index of x restricted to `scope`; x is a full assignment over 1..n.
std::size_t scope_index(const Hypersite& scope, std::span<const int> x, int labels);

/// Margin of a table over `scope` onto `target` (target must be a subset).
std::vector<Rational> marginalize_table(std::span<const Rational> values,
                                        const Hypersite& scope,
                                        const Hypersite& target, int labels);

/// Re-expresses a table over `scope` as a table over the superset `target`
/// (values repeated along the extra sites).
std::vector<Rational> broadcast_table(std::span<const Rational> values,
                                      const Hypersite& scope,
                                      const Hypersite& target, int labels);

/// For each local index of `scope`, the index of its restriction to `target`.
std::vector<std::size_t> restriction_map(const Hypersite& scope,
                                         const Hypersite& target, int labels);

}  // namespace deltamap
