#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "deltamap/lp.hpp"
#include "deltamap/model.hpp"
#include "deltamap/orthomarginal.hpp"

namespace deltamap {

/// What an LP column stands for.
enum class VarRole {
  LocalProb,   // p_s(x_s)
  LocalPos,    // a_s(x_s), positive part of q_s
  LocalNeg,    // b_s(x_s), negative part of q_s
  LocalFree,   // q_s(x_s) as a single free column
  GlobalProb,  // p(x)
  GlobalPos,   // A(x)
  GlobalNeg,   // B(x)
  GlobalFree,  // q(x) as a single free column
  CapPos,      // positive split of a frontier margin of q (global delta LP)
  CapNeg,
};

struct VarRef {
  VarRole role;
  Hypersite scope;     // empty for global columns
  std::size_t config;  // local or global little-endian index
};

/// Bijection between LP columns and (role, hypersite, configuration).
class VariableMap {
 public:
  VariableMap(int sites, int labels, HypersiteSet scopes)
      : sites_(sites), labels_(labels), scopes_(std::move(scopes)) {}

  std::size_t add(LinearProgram& lp, VarRef ref, std::optional<Rational> lower);

  int sites() const noexcept { return sites_; }
  int labels() const noexcept { return labels_; }
  /// Hypersites whose tables extract_marginals reports.
  const HypersiteSet& scopes() const noexcept { return scopes_; }
  std::size_t size() const noexcept { return refs_.size(); }
  const VarRef& operator[](std::size_t variable) const { return refs_.at(variable); }
  std::optional<std::size_t> find(const VarRef& ref) const;

  static std::string name_of(const VarRef& ref);

 private:
  int sites_;
  int labels_;
  HypersiteSet scopes_;
  std::vector<VarRef> refs_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

enum class ProblemKind { Min, Max, Delta };
const char* to_string(ProblemKind kind);

struct Relaxation {
  LinearProgram lp;
  VariableMap variables;
  ProblemKind kind;
};

struct BuildOptions {
  /// Keep a single normalization row per connected component of the overlap
  /// graph instead of one per frontier hypersite.
  bool reduce = false;
};

/// Local-polytope LPs over a frontier-form model. Throw PreconditionError
/// when the model still has non-frontier factors.
Relaxation build_pseudo_emin(const Model& model, const BuildOptions& options = {});
Relaxation build_pseudo_emax(const Model& model, const BuildOptions& options = {});
Relaxation build_pseudo_delta_emin(const Model& model, const BuildOptions& options = {});
Relaxation build_pseudo(const Model& model, ProblemKind kind, const BuildOptions& options = {});

/// Convex-hull LP over all of L^n (expectation over a full joint
/// distribution, or over a joint delta-distribution). Throws SizeError above
/// `cap`.
Relaxation build_exact_em(const Model& model, ProblemKind kind, std::size_t cap = dense_cap());

/// Global reformulation of the local LPs: free joint table whose frontier
/// margins obey the local axioms. Verification only.
Relaxation build_global_pseudo(const Model& model, ProblemKind kind,
                               std::size_t cap = dense_cap());

/// min sum |Q| over joint tables Q whose frontier margins equal the given
/// zero-sum delta-marginals. Throws PreconditionError for inconsistent input.
Relaxation build_min_l1_completion(const DeltaMarginalSet& tables,
                                   std::size_t cap = dense_cap());

/// Per-hypersite tables from an optimal solution (q_s = a_s - b_s for split
/// columns; margins of the joint table for global programs).
/// Throws ExtractionError when the solution is not optimal.
MarginalSet extract_marginals(const LpSolution& solution, const VariableMap& variables);

/// Joint table of a global program (p, or q = A - B).
DenseFunction extract_global(const LpSolution& solution, const VariableMap& variables);

}  // namespace deltamap
