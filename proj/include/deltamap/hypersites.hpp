#pragma once

#include <initializer_list>
#include <map>
#include <vector>

#include "deltamap/hypersite.hpp"

namespace deltamap {

/// Ordered set of distinct hypersites (lexicographic order, so the empty
/// hypersite, when present, comes first).
class HypersiteSet {
 public:
  HypersiteSet() = default;
  HypersiteSet(std::initializer_list<Hypersite> members);
  explicit HypersiteSet(std::vector<Hypersite> members);

  /// Returns false when the hypersite was already present.
  bool insert(const Hypersite& member);
  bool erase(const Hypersite& member);
  bool contains(const Hypersite& member) const;

  const std::vector<Hypersite>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  /// Union of all member sites.
  Hypersite sites() const;

  bool operator==(const HypersiteSet&) const = default;

 private:
  std::vector<Hypersite> members_;
};

using Ancestry = std::map<Hypersite, Hypersite>;
using RhoMap = std::map<Hypersite, long long>;

/// Members not strictly contained in another member. Throws EmptyInput.
HypersiteSet frontier(const HypersiteSet& set);

/// Maps each non-frontier member to its lexicographically smallest frontier
/// superset.
Ancestry ancestry(const HypersiteSet& set);

/// Frontier plus every non-empty intersection of frontier members, plus the
/// empty hypersite. Throws EmptyInput.
HypersiteSet frontier_closure(const HypersiteSet& set);

/// Integer weights of the ortho-marginal projection: 1 on the frontier,
/// otherwise 1 minus the sum over strict supersets inside the closure.
RhoMap rho_coefficients(const HypersiteSet& closure, const HypersiteSet& front);

/// True when every pairwise intersection of members is a member (the empty
/// intersection included).
bool closed_under_intersection(const HypersiteSet& set);

}  // namespace deltamap
