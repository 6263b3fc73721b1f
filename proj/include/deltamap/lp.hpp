#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "deltamap/rational.hpp"

namespace deltamap {

enum class Sense { Minimize, Maximize };
enum class Relation { Equal, LessEqual, GreaterEqual };
enum class Arithmetic { Rational, Float };
enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus status);
const char* to_string(Arithmetic arithmetic);

struct LpTerm {
  std::size_t variable;
  Rational coefficient;
};

struct LpVariable {
  std::string name;
  std::optional<Rational> lower;
  std::optional<Rational> upper;
};

struct LpConstraint {
  std::string name;
  std::vector<LpTerm> terms;
  Relation relation;
  Rational rhs;
};

/// A linear program with named variables and sparse rows. All validation
/// happens while building, so a constructed program always solves.
class LinearProgram {
 public:
  explicit LinearProgram(Sense sense = Sense::Minimize) : sense_(sense) {}

  /// Unbounded on both sides unless bounds are given.
  std::size_t add_variable(std::string name, std::optional<Rational> lower = std::nullopt,
                           std::optional<Rational> upper = std::nullopt);
  std::size_t add_nonnegative(std::string name) { return add_variable(std::move(name), Rational(0)); }

  /// Adds c to the objective coefficient of `variable`.
  void add_objective(std::size_t variable, const Rational& c);
  void set_sense(Sense sense) noexcept { sense_ = sense; }

  std::size_t add_constraint(std::string name, std::vector<LpTerm> terms, Relation relation,
                             Rational rhs);

  Sense sense() const noexcept { return sense_; }
  const std::vector<LpVariable>& variables() const noexcept { return variables_; }
  const std::vector<Rational>& objective() const noexcept { return objective_; }
  const std::vector<LpConstraint>& constraints() const noexcept { return constraints_; }
  std::optional<std::size_t> find_variable(const std::string& name) const;

 private:
  Sense sense_;
  std::vector<LpVariable> variables_;
  std::vector<Rational> objective_;
  std::vector<LpConstraint> constraints_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Arithmetic arithmetic = Arithmetic::Rational;
  /// Objective at `values`, in the program's own sense. Exact in rational mode.
  Rational objective;
  std::vector<Rational> values;
  std::size_t iterations = 0;

  bool optimal() const noexcept { return status == LpStatus::Optimal; }
};

struct SolveOptions {
  Arithmetic arithmetic = Arithmetic::Rational;
  /// Pivot and feasibility tolerance in float mode.
  double float_tolerance = 1e-9;
  std::size_t max_iterations = 5'000'000;
};

LpSolution solve(const LinearProgram& lp, const SolveOptions& options = {});

/// CPLEX-style LP text, for cross-checking with external solvers. Non-dyadic
/// rationals are written with 17 significant digits.
void write_lp(const LinearProgram& lp, std::ostream& out);

}  // namespace deltamap
