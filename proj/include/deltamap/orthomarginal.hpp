#pragma once

#include <map>
#include <string>
#include <vector>

#include "deltamap/hypersites.hpp"
#include "deltamap/rational.hpp"

namespace deltamap {

/// Default cap on L^n for dense global tables. The DELTAMAP_DENSE_CAP
/// environment variable overrides it.
inline constexpr std::size_t kDefaultDenseCap = 4096;
std::size_t dense_cap();

/// A function L^n -> Q stored as a little-endian table. Desk-scale only.
class DenseFunction {
 public:
  /// Zero function. Throws SizeError when L^n exceeds `cap`.
  DenseFunction(int sites, int labels, std::size_t cap = dense_cap());
  DenseFunction(int sites, int labels, std::vector<Rational> values,
                std::size_t cap = dense_cap());

  int num_sites() const noexcept { return sites_; }
  int num_labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<Rational>& values() const noexcept { return values_; }
  std::vector<Rational>& values() noexcept { return values_; }
  Rational& operator[](std::size_t index) { return values_[index]; }
  const Rational& operator[](std::size_t index) const { return values_[index]; }

  bool operator==(const DenseFunction&) const = default;

 private:
  int sites_;
  int labels_;
  std::vector<Rational> values_;
};

/// Per-hypersite tables (pseudo-marginals p_s, or delta-marginals q_s).
struct MarginalSet {
  int sites = 0;
  int labels = 2;
  std::map<Hypersite, std::vector<Rational>> tables;

  HypersiteSet scopes() const;
  const std::vector<Rational>& at(const Hypersite& scope) const { return tables.at(scope); }
  bool operator==(const MarginalSet&) const = default;
};

using PseudoMarginalSet = MarginalSet;
using DeltaMarginalSet = MarginalSet;

struct ConsistencyReport {
  bool consistent = true;
  std::vector<std::string> violations;
  explicit operator bool() const noexcept { return consistent; }
};

/// u_c(x_c): sum of f over every x agreeing with x_c. The margin onto the
/// empty hypersite is the single total sum.
std::vector<Rational> margin(const DenseFunction& f, const Hypersite& c);

/// Margins of f onto every member of `set`.
MarginalSet margins(const DenseFunction& f, const HypersiteSet& set);

/// Ortho-marginal projection of f onto the span of local functions over C.
DenseFunction project(const DenseFunction& f, const HypersiteSet& set);

Rational inner_product(const DenseFunction& f, const DenseFunction& g);

/// Local consistency: overlapping frontier members agree on their shared
/// margins, and every non-frontier table equals its ancestor's margin.
ConsistencyReport check_pseudo_marginals(const MarginalSet& tables);

/// A global function whose margins over the hypersite-set of `tables` are
/// exactly those tables; `v` chooses the component orthogonal to them.
/// Throws PreconditionError when the tables are not consistent.
DenseFunction lift(const MarginalSet& tables, const DenseFunction& v);

}  // namespace deltamap
