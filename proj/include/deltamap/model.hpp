#pragma once

#include <span>
#include <string>
#include <vector>

#include "deltamap/hypersite.hpp"
#include "deltamap/hypersites.hpp"
#include "deltamap/rational.hpp"

namespace deltamap {

/// Dense cost table g_s over L^|scope|, little-endian indexed.
class FactorTable {
 public:
  FactorTable(Hypersite scope, std::vector<Rational> values)
      : scope_(std::move(scope)), values_(std::move(values)) {}

  const Hypersite& scope() const noexcept { return scope_; }
  std::span<const Rational> values() const noexcept { return values_; }
  std::vector<Rational>& mutable_values() noexcept { return values_; }
  const Rational& operator[](std::size_t index) const { return values_[index]; }

  bool is_constant() const;

  bool operator==(const FactorTable&) const = default;

 private:
  Hypersite scope_;
  std::vector<Rational> values_;
};

/// A higher-order cost model g(x) = sum_s g_s(x_s) over n sites with L labels.
/// Immutable once built; factors are kept sorted by scope and duplicate scopes
/// are summed.
class Model {
 public:
  Model(int sites, int labels, std::vector<FactorTable> factors);

  int num_sites() const noexcept { return sites_; }
  int num_labels() const noexcept { return labels_; }
  const std::vector<FactorTable>& factors() const noexcept { return factors_; }

  /// Null when no factor has this scope.
  const FactorTable* find(const Hypersite& scope) const;
  HypersiteSet scopes() const;

  bool operator==(const Model&) const = default;

 private:
  int sites_;
  int labels_;
  std::vector<FactorTable> factors_;
};

/// Throws InvalidAssignment when x does not fit the model.
void check_assignment(const Model& model, std::span<const int> x);

Rational evaluate(const Model& model, std::span<const int> x);

struct ModelDiagnostics {
  bool covers = true;
  std::vector<int> uncovered_sites;
  std::vector<Hypersite> constant_factors;
};

ModelDiagnostics validate(const Model& model);

/// Folds every non-frontier factor into its ancestor's table. The result has
/// only frontier scopes and the same cost on every assignment.
Model merge_to_frontier(const Model& model);

bool is_frontier_form(const Model& model);

/// All assignments in little-endian order over sites 1..n; handy for the
/// exhaustive checks. `count` is L^n.
Assignment assignment_at(std::size_t index, int sites, int labels);

/// Stable 64-bit FNV-1a digest of the canonical model contents, as 16 hex
/// digits. Identifies instances in certificates.
std::string fingerprint(const Model& model);

}  // namespace deltamap
