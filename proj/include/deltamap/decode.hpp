#pragma once

#include <string>
#include <vector>

#include "deltamap/errors.hpp"
#include "deltamap/lp.hpp"
#include "deltamap/model.hpp"
#include "deltamap/orthomarginal.hpp"

namespace deltamap {

/// Which mode is being decoded.
enum class Sign { Inf, Sup };
const char* to_string(Sign sign);

struct DecodeOptions {
  /// The tables are delta-marginals q_s: Inf selects q_s > eps, Sup selects
  /// q_s < -eps. Otherwise they are probabilities and p_s > eps is selected
  /// for either sign.
  bool delta = false;
  /// Rational: eps = 0. Float: eps = 1e-7 * max |value| of each table.
  Arithmetic arithmetic = Arithmetic::Rational;
};

/// Smallest magnitude that counts as support: 0 in rational mode,
/// 1e-7 * max |value| of the table in float mode.
Rational support_threshold(std::span<const Rational> table, Arithmetic arithmetic);

/// No admissible sub-sample at some step of the greedy pass.
class DecodeFailure : public Error {
 public:
  DecodeFailure(std::size_t step, Hypersite scope, std::vector<std::vector<int>> candidates,
                std::vector<int> partial);

  /// 1-based position of `scope` in the filtered frontier.
  std::size_t step() const noexcept { return step_; }
  const Hypersite& scope() const noexcept { return scope_; }
  /// Local configurations passing the sign test, none of which agree with the
  /// sites already fixed.
  const std::vector<std::vector<int>>& candidates() const noexcept { return candidates_; }
  /// Labels fixed so far; -1 marks a free site.
  const std::vector<int>& partial() const noexcept { return partial_; }

 private:
  std::size_t step_;
  Hypersite scope_;
  std::vector<std::vector<int>> candidates_;
  std::vector<int> partial_;
};

/// Structured text record of a decode failure.
std::string failure_certificate(const Model& model, Sign sign, const DecodeFailure& failure);

/// True when g_s cannot be written as a sum of functions over the overlaps of
/// s with the other frontier members. Throws PreconditionError when s is not
/// a frontier member.
bool is_atomic(const Model& model, const Hypersite& scope);

/// Drops non-atomic frontier members one at a time (lexicographically first
/// offender, then re-test) until every remaining member is atomic. Throws
/// DecodeUnsupported when the survivors stop covering the sites the model
/// covers.
HypersiteSet atomic_frontier(const Model& model);

/// Greedy assembly of an assignment from optimal (delta-)marginals over the
/// frontier of `model`. Members are visited in lexicographic order and each
/// picks its lexicographically smallest admissible configuration. Sites no
/// factor touches get label 0. Throws DecodeFailure.
Assignment greedy_decode(const MarginalSet& marginals, const Model& model, Sign sign,
                         const DecodeOptions& options = {});

/// The model restricted to x_s = config, over the remaining sites renumbered
/// 1..k in increasing order. Fully clamped factors are folded into a factor
/// over the empty hypersite, so evaluate(model, expand(y)) equals
/// evaluate(reduced, y).
struct ConditionedModel {
  Model model;
  /// Original site of each reduced site.
  std::vector<int> free_sites;
  /// Original-site labels; -1 on free sites.
  std::vector<int> fixed;

  Assignment expand(const Assignment& reduced) const;
};

ConditionedModel conditioned_resolve(const Model& model, const Hypersite& scope,
                                     const std::vector<int>& config);
ConditionedModel conditioned_resolve(const ConditionedModel& base, const Hypersite& scope,
                                     const std::vector<int>& config);

/// Slow decoder: solve the local LP (min for Inf, max for Sup), clamp the first
/// frontier member to its smallest supported configuration, and repeat on the
/// smaller model until every site is fixed.
Assignment resolve_by_conditioning(const Model& model, Sign sign,
                                   const SolveOptions& options = {});

}  // namespace deltamap
