#include "deltamap/deltadist.hpp"

#include "deltamap/errors.hpp"

namespace deltamap {

namespace {

bool sums_to_zero(std::span<const Rational> q, const DeltaTolerance& tol) {
  return abs(total(q)) <= tol.zero_sum * (1 + l1_norm(q));
}

}  // namespace

Rational total(std::span<const Rational> q) {
  Rational sum;
  for (const auto& v : q) sum += v;
  return sum;
}

Rational l1_norm(std::span<const Rational> q) {
  Rational sum;
  for (const auto& v : q) sum += abs(v);
  return sum;
}

bool is_delta(std::span<const Rational> q, const DeltaTolerance& tol) {
  return sums_to_zero(q, tol) && l1_norm(q) <= 2 + tol.saturation;
}

bool is_delta(const DenseFunction& q, const DeltaTolerance& tol) {
  return is_delta(std::span<const Rational>(q.values()), tol);
}

bool is_saturated(std::span<const Rational> q, const DeltaTolerance& tol) {
  return abs(l1_norm(q) - 2) <= tol.saturation;
}

DeltaDecomposition decompose(const DenseFunction& q, const DeltaTolerance& tol) {
  if (!is_delta(q, tol)) throw PreconditionError("decompose: not a delta-distribution");

  DenseFunction p(q.num_sites(), q.num_labels(), q.size());
  DenseFunction p_prime(q.num_sites(), q.num_labels(), q.size());
  for (std::size_t x = 0; x < q.size(); ++x) {
    if (sgn(q[x]) > 0) p[x] = q[x];
    if (sgn(q[x]) < 0) p_prime[x] = -q[x];
  }

  const Rational mass = l1_norm(q.values());
  const bool unique = is_saturated(q.values(), tol);
  if (!unique) {
    // tau = (1 - |q|/2) / (L^n - |q|) spread uniformly over the slack 1 - |q(x)|
    const Rational tau = (1 - mass / 2) / (Rational(static_cast<long>(q.size())) - mass);
    for (std::size_t x = 0; x < q.size(); ++x) {
      const Rational fill = tau * (1 - abs(q[x]));
      p[x] += fill;
      p_prime[x] += fill;
    }
  }
  return {std::move(p), std::move(p_prime), unique};
}

Rational delta_scale_bound(std::span<const Rational> q, const DeltaTolerance& tol) {
  const Rational mass = l1_norm(q);
  if (sgn(mass) == 0) throw PreconditionError("delta_scale_bound: q is identically zero");
  if (!sums_to_zero(q, tol)) throw PreconditionError("delta_scale_bound: q does not sum to 0");
  return Rational(2) / mass;
}

Rational delta_expectation(const DenseFunction& f, const DenseFunction& q) {
  if (f.num_sites() != q.num_sites() || f.num_labels() != q.num_labels()) {
    throw PreconditionError("delta_expectation: dimension mismatch");
  }
  return inner_product(f, q);
}

}  // namespace deltamap
