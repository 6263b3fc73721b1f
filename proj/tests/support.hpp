#pragma once

#include <random>
#include <vector>

#include "deltamap/model.hpp"
#include "deltamap/orthomarginal.hpp"

namespace deltamap::testing {

inline std::vector<Rational> ints(std::initializer_list<long> values) {
  std::vector<Rational> out;
  for (long v : values) out.emplace_back(v);
  return out;
}

inline std::vector<Rational> values_of(const FactorTable& f) {
  return {f.values().begin(), f.values().end()};
}

/// Three binary sites, XOR costs on {1,2} and {2,3}.
inline Model m1() {
  return Model(3, 2,
               {FactorTable(Hypersite{1, 2}, ints({0, 1, 1, 0})),
                FactorTable(Hypersite{2, 3}, ints({0, 1, 1, 0}))});
}

inline long draw(std::mt19937_64& rng, long lo, long hi) {
  return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline DenseFunction random_dense(int sites, int labels, std::mt19937_64& rng, long lo = -5,
                                  long hi = 5) {
  DenseFunction f(sites, labels);
  for (auto& v : f.values()) v = Rational(draw(rng, lo, hi));
  return f;
}

/// Random non-empty hypersite over 1..n.
inline Hypersite random_hypersite(int n, std::size_t max_size, std::mt19937_64& rng) {
  std::vector<int> sites;
  while (sites.empty()) {
    for (int i = 1; i <= n; ++i) {
      if (rng() % 2 == 0 && sites.size() < max_size) sites.push_back(i);
    }
  }
  return Hypersite(std::move(sites));
}

inline HypersiteSet random_hypersite_set(int n, std::size_t members, std::size_t max_size,
                                         std::mt19937_64& rng) {
  HypersiteSet set;
  const auto count = static_cast<std::size_t>(draw(rng, 1, static_cast<long>(members)));
  // Small n may not offer `count` distinct hypersites; give up after a while.
  for (int attempt = 0; set.size() < count && attempt < 1000; ++attempt) {
    set.insert(random_hypersite(n, max_size, rng));
  }
  return set;
}

/// Model with random integer tables over the given scopes.
inline Model random_model(int n, int labels, const HypersiteSet& scopes, std::mt19937_64& rng,
                          long lo = 0, long hi = 9) {
  std::vector<FactorTable> factors;
  for (const auto& s : scopes) {
    std::vector<Rational> values(table_size(labels, s.size()));
    for (auto& v : values) v = Rational(draw(rng, lo, hi));
    factors.emplace_back(s, std::move(values));
  }
  return Model(n, labels, std::move(factors));
}

/// Straightforward minimum over L^n, independent of the oracle module.
inline std::pair<Rational, Rational> brute_range(const Model& model) {
  std::size_t total = 1;
  for (int i = 0; i < model.num_sites(); ++i) total *= static_cast<std::size_t>(model.num_labels());
  Rational lo;
  Rational hi;
  for (std::size_t k = 0; k < total; ++k) {
    const auto v = evaluate(model, assignment_at(k, model.num_sites(), model.num_labels()));
    if (k == 0 || v < lo) lo = v;
    if (k == 0 || v > hi) hi = v;
  }
  return {lo, hi};
}

}  // namespace deltamap::testing
