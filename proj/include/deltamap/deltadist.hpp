#pragma once

#include <span>

#include "deltamap/orthomarginal.hpp"
#include "deltamap/rational.hpp"

namespace deltamap {

/// Comparison slack for delta-distribution tests. Zero means exact, which is
/// the right setting for anything produced in rational arithmetic.
struct DeltaTolerance {
  /// |sum q| <= zero_sum * (1 + sum |q|)
  Rational zero_sum;
  /// | sum |q| - 2 | <= saturation counts as saturated
  Rational saturation;

  static DeltaTolerance exact() { return {}; }
  /// Settings for values that came out of a floating-point solve.
  static DeltaTolerance floating() {
    return {Rational(1, 1000000000), Rational(1, 10000000)};
  }
};

Rational total(std::span<const Rational> q);
Rational l1_norm(std::span<const Rational> q);

/// Zero sum and L1 mass at most 2: the characterization of p - p'.
bool is_delta(std::span<const Rational> q, const DeltaTolerance& tol = DeltaTolerance::exact());
bool is_delta(const DenseFunction& q, const DeltaTolerance& tol = DeltaTolerance::exact());

/// L1 mass equal to 2 (within tolerance).
bool is_saturated(std::span<const Rational> q,
                  const DeltaTolerance& tol = DeltaTolerance::exact());

struct DeltaDecomposition {
  DenseFunction positive;  // p
  DenseFunction negative;  // p'
  /// True when sum |q| = 2, the only case in which (p, p') is unique.
  bool unique;
};

/// Splits q into two distributions with q = p - p'. For a non-saturated q the
/// constant-tau completion is used, so the result is deterministic.
/// Throws PreconditionError when q is not a delta-distribution.
DeltaDecomposition decompose(const DenseFunction& q,
                             const DeltaTolerance& tol = DeltaTolerance::exact());

/// 2 / sum |q|: the largest scale keeping q a delta-distribution.
/// Throws PreconditionError for a non-zero-sum or identically zero q.
Rational delta_scale_bound(std::span<const Rational> q,
                           const DeltaTolerance& tol = DeltaTolerance::exact());

/// sum_x f(x) q(x)
Rational delta_expectation(const DenseFunction& f, const DenseFunction& q);

}  // namespace deltamap
