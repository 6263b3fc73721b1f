#include "deltamap/hypersite.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "deltamap/errors.hpp"

namespace deltamap {

namespace {

void check_sites(const std::vector<int>& sites) {
  for (std::size_t k = 0; k < sites.size(); ++k) {
    if (sites[k] < 1) {
      throw ModelError("site index " + std::to_string(sites[k]) + " is not positive");
    }
    if (k > 0 && sites[k] <= sites[k - 1]) {
      throw ModelError("hypersite sites must be strictly increasing");
    }
  }
}

// Upper bound on any single dense table we are willing to index.
constexpr std::size_t kMaxTableEntries = std::size_t{1} << 32;

}  // namespace

Hypersite::Hypersite(std::initializer_list<int> sites) : sites_(sites) {
  check_sites(sites_);
}

Hypersite::Hypersite(std::vector<int> sites) : sites_(std::move(sites)) {
  check_sites(sites_);
}

Hypersite Hypersite::from_unsorted(std::vector<int> sites) {
  std::sort(sites.begin(), sites.end());
  return Hypersite(std::move(sites));
}

bool Hypersite::contains(int site) const {
  return std::binary_search(sites_.begin(), sites_.end(), site);
}

std::size_t Hypersite::position(int site) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), site);
  if (it == sites_.end() || *it != site) return npos;
  return static_cast<std::size_t>(it - sites_.begin());
}

bool Hypersite::is_subset_of(const Hypersite& other) const {
  return std::includes(other.sites_.begin(), other.sites_.end(), sites_.begin(),
                       sites_.end());
}

Hypersite Hypersite::intersect(const Hypersite& other) const {
  Hypersite result;
  std::set_intersection(sites_.begin(), sites_.end(), other.sites_.begin(),
                        other.sites_.end(), std::back_inserter(result.sites_));
  return result;
}

Hypersite Hypersite::unite(const Hypersite& other) const {
  Hypersite result;
  std::set_union(sites_.begin(), sites_.end(), other.sites_.begin(), other.sites_.end(),
                 std::back_inserter(result.sites_));
  return result;
}

Hypersite Hypersite::minus(const Hypersite& other) const {
  Hypersite result;
  std::set_difference(sites_.begin(), sites_.end(), other.sites_.begin(),
                      other.sites_.end(), std::back_inserter(result.sites_));
  return result;
}

std::string Hypersite::to_string() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t k = 0; k < sites_.size(); ++k) {
    if (k > 0) out << ',';
    out << sites_[k];
  }
  out << '}';
  return out.str();
}

std::size_t table_size(int labels, std::size_t arity) {
  if (labels < 1) throw ModelError("label count must be positive");
  std::size_t size = 1;
  for (std::size_t k = 0; k < arity; ++k) {
    if (size > kMaxTableEntries / static_cast<std::size_t>(labels)) {
      throw SizeError("table of arity " + std::to_string(arity) + " over " +
                      std::to_string(labels) + " labels is too large");
    }
    size *= static_cast<std::size_t>(labels);
  }
  return size;
}

std::size_t encode_local(std::span<const int> local, int labels) {
  std::size_t index = 0;
  for (std::size_t k = local.size(); k-- > 0;) {
    index = index * static_cast<std::size_t>(labels) + static_cast<std::size_t>(local[k]);
  }
  return index;
}

std::vector<int> decode_local(std::size_t index, std::size_t arity, int labels) {
  std::vector<int> local(arity);
  for (std::size_t k = 0; k < arity; ++k) {
    local[k] = static_cast<int>(index % static_cast<std::size_t>(labels));
    index /= static_cast<std::size_t>(labels);
  }
  return local;
}

std::size_t scope_index(const Hypersite& scope, std::span<const int> x, int labels) {
  std::size_t index = 0;
  for (std::size_t k = scope.size(); k-- > 0;) {
    index = index * static_cast<std::size_t>(labels) +
            static_cast<std::size_t>(x[static_cast<std::size_t>(scope[k] - 1)]);
  }
  return index;
}

std::vector<std::size_t> restriction_map(const Hypersite& scope, const Hypersite& target,
                                         int labels) {
  if (!target.is_subset_of(scope)) {
    throw PreconditionError(target.to_string() + " is not a subset of " + scope.to_string());
  }
  const std::size_t size = table_size(labels, scope.size());
  std::vector<std::size_t> positions(target.size());
  for (std::size_t k = 0; k < target.size(); ++k) positions[k] = scope.position(target[k]);

  std::vector<std::size_t> map(size);
  std::vector<int> digits(scope.size(), 0);
  std::vector<int> local(target.size());
  for (std::size_t index = 0; index < size; ++index) {
    for (std::size_t k = 0; k < target.size(); ++k) local[k] = digits[positions[k]];
    map[index] = encode_local(local, labels);
    // odometer, first site fastest
    for (std::size_t k = 0; k < digits.size(); ++k) {
      if (++digits[k] < labels) break;
      digits[k] = 0;
    }
  }
  return map;
}

std::vector<Rational> marginalize_table(std::span<const Rational> values,
                                        const Hypersite& scope, const Hypersite& target,
                                        int labels) {
  const auto map = restriction_map(scope, target, labels);
  if (values.size() != map.size()) throw ModelError("table length does not match its scope");
  std::vector<Rational> result(table_size(labels, target.size()));
  for (std::size_t index = 0; index < map.size(); ++index) result[map[index]] += values[index];
  return result;
}

std::vector<Rational> broadcast_table(std::span<const Rational> values,
                                      const Hypersite& scope, const Hypersite& target,
                                      int labels) {
  const auto map = restriction_map(target, scope, labels);
  if (values.size() != table_size(labels, scope.size())) {
    throw ModelError("table length does not match its scope");
  }
  std::vector<Rational> result(map.size());
  for (std::size_t index = 0; index < map.size(); ++index) result[index] = values[map[index]];
  return result;
}

}  // namespace deltamap
