#include "deltamap/hypersites.hpp"

#include <algorithm>

#include "deltamap/errors.hpp"

namespace deltamap {

HypersiteSet::HypersiteSet(std::initializer_list<Hypersite> members) {
  for (const auto& m : members) insert(m);
}

HypersiteSet::HypersiteSet(std::vector<Hypersite> members) {
  for (auto& m : members) insert(m);
}

bool HypersiteSet::insert(const Hypersite& member) {
  auto it = std::lower_bound(members_.begin(), members_.end(), member);
  if (it != members_.end() && *it == member) return false;
  members_.insert(it, member);
  return true;
}

bool HypersiteSet::erase(const Hypersite& member) {
  auto it = std::lower_bound(members_.begin(), members_.end(), member);
  if (it == members_.end() || *it != member) return false;
  members_.erase(it);
  return true;
}

bool HypersiteSet::contains(const Hypersite& member) const {
  return std::binary_search(members_.begin(), members_.end(), member);
}

Hypersite HypersiteSet::sites() const {
  Hypersite all;
  for (const auto& m : members_) all = all.unite(m);
  return all;
}

HypersiteSet frontier(const HypersiteSet& set) {
  if (set.empty()) throw EmptyInput("frontier of an empty hypersite-set");
  HypersiteSet front;
  for (const auto& c : set) {
    const bool dominated = std::any_of(set.begin(), set.end(), [&](const Hypersite& t) {
      return c.is_strict_subset_of(t);
    });
    if (!dominated) front.insert(c);
  }
  return front;
}

Ancestry ancestry(const HypersiteSet& set) {
  Ancestry result;
  if (set.empty()) return result;
  const auto front = frontier(set);
  for (const auto& c : set) {
    if (front.contains(c)) continue;
    // members are sorted, so the first superset found is the smallest
    auto it = std::find_if(front.begin(), front.end(),
                           [&](const Hypersite& t) { return c.is_strict_subset_of(t); });
    if (it == front.end()) {
      throw InconsistentSet("no frontier ancestor for " + c.to_string());
    }
    result.emplace(c, *it);
  }
  return result;
}

HypersiteSet frontier_closure(const HypersiteSet& set) {
  const auto front = frontier(set);
  const auto& ordered = front.members();

  HypersiteSet closure;
  closure.insert(ordered.front());
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    const auto& ci = ordered[i];
    std::vector<Hypersite> fresh;
    for (const auto& c : closure) {
      auto meet = c.intersect(ci);
      if (!meet.empty() && !closure.contains(meet)) fresh.push_back(std::move(meet));
    }
    closure.insert(ci);
    for (const auto& f : fresh) closure.insert(f);
  }

  // Fixpoint pass: any intersection the single sweep left out is added here.
  for (bool grown = true; grown;) {
    grown = false;
    const auto snapshot = closure.members();
    for (std::size_t a = 0; a < snapshot.size(); ++a) {
      for (std::size_t b = a + 1; b < snapshot.size(); ++b) {
        auto meet = snapshot[a].intersect(snapshot[b]);
        if (!meet.empty() && closure.insert(meet)) grown = true;
      }
    }
  }

  closure.insert(Hypersite{});
  return closure;
}

RhoMap rho_coefficients(const HypersiteSet& closure, const HypersiteSet& front) {
  std::vector<Hypersite> order = closure.members();
  // decreasing cardinality, lexicographic within a cardinality
  std::stable_sort(order.begin(), order.end(), [](const Hypersite& a, const Hypersite& b) {
    return a.size() > b.size();
  });

  RhoMap rho;
  for (const auto& c : order) {
    if (front.contains(c)) {
      rho[c] = 1;
      continue;
    }
    long long total = 0;
    for (const auto& [t, weight] : rho) {
      if (c.is_strict_subset_of(t)) total += weight;
    }
    rho[c] = 1 - total;
  }
  return rho;
}

bool closed_under_intersection(const HypersiteSet& set) {
  const auto& m = set.members();
  for (std::size_t a = 0; a < m.size(); ++a) {
    for (std::size_t b = a + 1; b < m.size(); ++b) {
      if (!set.contains(m[a].intersect(m[b]))) return false;
    }
  }
  return true;
}

}  // namespace deltamap
