#include "deltamap/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "deltamap/errors.hpp"

namespace deltamap {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

const char* to_string(Arithmetic arithmetic) {
  return arithmetic == Arithmetic::Rational ? "rational" : "float";
}

std::size_t LinearProgram::add_variable(std::string name, std::optional<Rational> lower,
                                        std::optional<Rational> upper) {
  if (name.empty()) throw LpError("variable names must be non-empty");
  if (lower && upper && *lower > *upper) {
    throw LpError("variable " + name + " has lower bound above upper bound");
  }
  if (index_.count(name)) throw LpError("duplicate variable name " + name);
  const auto id = variables_.size();
  index_.emplace(name, id);
  variables_.push_back({std::move(name), std::move(lower), std::move(upper)});
  objective_.emplace_back(0);
  return id;
}

void LinearProgram::add_objective(std::size_t variable, const Rational& c) {
  if (variable >= variables_.size()) throw LpError("objective references unknown variable");
  objective_[variable] += c;
}

std::size_t LinearProgram::add_constraint(std::string name, std::vector<LpTerm> terms,
                                          Relation relation, Rational rhs) {
  for (const auto& t : terms) {
    if (t.variable >= variables_.size()) {
      throw LpError("constraint " + name + " references unknown variable " +
                    std::to_string(t.variable));
    }
  }
  constraints_.push_back({std::move(name), std::move(terms), relation, std::move(rhs)});
  return constraints_.size() - 1;
}

std::optional<std::size_t> LinearProgram::find_variable(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

// ---------------------------------------------------------------------------
// Standard form: min c.y  s.t.  A y = b,  y >= 0,  b >= 0.

struct ColumnMap {
  enum Kind { Shifted, Mirrored, Split } kind;
  Rational offset;  // lower bound (Shifted) or upper bound (Mirrored)
  std::size_t column;
  std::size_t negative_column;  // Split only
};

struct StandardForm {
  std::size_t columns = 0;
  std::vector<std::vector<std::pair<std::size_t, Rational>>> rows;
  std::vector<Rational> rhs;
  std::vector<Rational> cost;
  /// Column of a +1 slack usable as the initial basic variable, per row.
  std::vector<std::optional<std::size_t>> unit_slack;
  std::vector<ColumnMap> maps;
  bool trivially_infeasible = false;
};

bool holds(const Rational& lhs, Relation relation, const Rational& rhs) {
  switch (relation) {
    case Relation::Equal: return lhs == rhs;
    case Relation::LessEqual: return lhs <= rhs;
    case Relation::GreaterEqual: return lhs >= rhs;
  }
  return false;
}

StandardForm to_standard_form(const LinearProgram& lp) {
  StandardForm form;
  const auto& vars = lp.variables();

  form.maps.reserve(vars.size());
  for (const auto& v : vars) {
    if (v.lower) {
      form.maps.push_back({ColumnMap::Shifted, *v.lower, form.columns++, 0});
    } else if (v.upper) {
      form.maps.push_back({ColumnMap::Mirrored, *v.upper, form.columns++, 0});
    } else {
      const auto pos = form.columns++;
      const auto neg = form.columns++;
      form.maps.push_back({ColumnMap::Split, Rational(0), pos, neg});
    }
  }

  form.cost.assign(form.columns, Rational(0));
  const bool maximize = lp.sense() == Sense::Maximize;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    Rational c = lp.objective()[j];
    if (maximize) c = -c;
    const auto& m = form.maps[j];
    switch (m.kind) {
      case ColumnMap::Shifted: form.cost[m.column] += c; break;
      case ColumnMap::Mirrored: form.cost[m.column] -= c; break;
      case ColumnMap::Split:
        form.cost[m.column] += c;
        form.cost[m.negative_column] -= c;
        break;
    }
  }

  struct PendingRow {
    std::vector<std::pair<std::size_t, Rational>> terms;
    Relation relation;
    Rational rhs;
  };
  std::vector<PendingRow> pending;

  for (const auto& con : lp.constraints()) {
    std::vector<std::pair<std::size_t, Rational>> terms;
    Rational rhs = con.rhs;
    auto add = [&](std::size_t column, const Rational& a) {
      for (auto& [col, coeff] : terms) {
        if (col == column) {
          coeff += a;
          return;
        }
      }
      terms.emplace_back(column, a);
    };
    for (const auto& t : con.terms) {
      const auto& m = form.maps[t.variable];
      switch (m.kind) {
        case ColumnMap::Shifted:
          add(m.column, t.coefficient);
          rhs -= t.coefficient * m.offset;
          break;
        case ColumnMap::Mirrored:
          add(m.column, -t.coefficient);
          rhs -= t.coefficient * m.offset;
          break;
        case ColumnMap::Split:
          add(m.column, t.coefficient);
          add(m.negative_column, -t.coefficient);
          break;
      }
    }
    std::erase_if(terms, [](const auto& t) { return sgn(t.second) == 0; });
    pending.push_back({std::move(terms), con.relation, std::move(rhs)});
  }

  // Upper bounds of doubly bounded variables become rows.
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (vars[j].lower && vars[j].upper) {
      std::vector<std::pair<std::size_t, Rational>> terms{{form.maps[j].column, Rational(1)}};
      pending.push_back({std::move(terms), Relation::LessEqual, *vars[j].upper - *vars[j].lower});
    }
  }

  for (auto& row : pending) {
    if (row.terms.empty()) {
      // empty row: drop it, or the whole program is infeasible
      if (!holds(Rational(0), row.relation, row.rhs)) form.trivially_infeasible = true;
      continue;
    }
    std::optional<std::size_t> slack;
    if (row.relation != Relation::Equal) {
      slack = form.columns++;
      form.cost.emplace_back(0);
      row.terms.emplace_back(*slack, Rational(row.relation == Relation::LessEqual ? 1 : -1));
    }
    if (sgn(row.rhs) < 0) {
      row.rhs = -row.rhs;
      for (auto& t : row.terms) t.second = -t.second;
    }
    std::optional<std::size_t> unit;
    if (slack && row.terms.back().second == 1) unit = slack;
    form.rows.push_back(std::move(row.terms));
    form.rhs.push_back(std::move(row.rhs));
    form.unit_slack.push_back(unit);
  }
  return form;
}

// ---------------------------------------------------------------------------
// Dense tableau simplex, generic over the scalar.

template <typename T>
struct Scalar;

template <>
struct Scalar<Rational> {
  static bool negative(const Rational& v, double) { return sgn(v) < 0; }
  static bool positive(const Rational& v, double) { return sgn(v) > 0; }
  static bool zero(const Rational& v, double) { return sgn(v) == 0; }
  static Rational make(const Rational& v) { return v; }
  static Rational exact(const Rational& v) { return v; }
  static void clean(Rational&, double) {}
  // a/b < c/d for positive b, d
  static bool ratio_less(const Rational& a, const Rational& b, const Rational& c,
                         const Rational& d) {
    return a * d < c * b;
  }
  static bool ratio_equal(const Rational& a, const Rational& b, const Rational& c,
                          const Rational& d) {
    return a * d == c * b;
  }
};

template <>
struct Scalar<double> {
  static bool negative(double v, double tol) { return v < -tol; }
  static bool positive(double v, double tol) { return v > tol; }
  static bool zero(double v, double tol) { return std::abs(v) <= tol; }
  static double make(const Rational& v) { return v.get_d(); }
  static Rational exact(double v) { return from_double(v); }
  static void clean(double& v, double tol) {
    if (std::abs(v) <= tol * 1e-3) v = 0.0;
  }
  static bool ratio_less(double a, double b, double c, double d) { return a / b < c / d - 1e-12; }
  static bool ratio_equal(double a, double b, double c, double d) {
    return std::abs(a / b - c / d) <= 1e-12;
  }
};

template <typename T>
class Tableau {
 public:
  Tableau(const StandardForm& form, double tol, std::size_t max_iterations)
      : columns_(form.columns), tol_(tol), max_iterations_(max_iterations) {
    rows_.reserve(form.rows.size());
    for (std::size_t i = 0; i < form.rows.size(); ++i) {
      std::vector<T> row(columns_ + 1, T(0));
      for (const auto& [col, coeff] : form.rows[i]) row[col] = Scalar<T>::make(coeff);
      row[columns_] = Scalar<T>::make(form.rhs[i]);
      rows_.push_back(std::move(row));
      basis_.push_back(form.unit_slack[i] ? *form.unit_slack[i] : columns_ + i);
    }
    cost_.assign(columns_ + 1, T(0));
  }

  std::size_t iterations() const noexcept { return iterations_; }

  /// Phase 1: minimise the sum of artificials. Returns false if infeasible.
  bool phase_one() {
    std::fill(cost_.begin(), cost_.end(), T(0));
    bool any_artificial = false;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (!artificial(basis_[i])) continue;
      any_artificial = true;
      for (std::size_t j = 0; j <= columns_; ++j) {
        if (!Scalar<T>::zero(rows_[i][j], 0.0)) cost_[j] -= rows_[i][j];
      }
    }
    if (!any_artificial) return true;
    if (run() != LpStatus::Optimal) throw LpError("phase one cannot be unbounded");
    // cost_[columns_] holds -z
    if (Scalar<T>::negative(cost_[columns_], tol_ * 100)) return false;

    // Drive remaining (zero-level) artificials out of the basis.
    std::vector<std::size_t> redundant;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (!artificial(basis_[i])) continue;
      std::size_t entering = columns_;
      for (std::size_t j = 0; j < columns_; ++j) {
        if (!Scalar<T>::zero(rows_[i][j], tol_)) {
          entering = j;
          break;
        }
      }
      if (entering == columns_) {
        redundant.push_back(i);
      } else {
        pivot(i, entering);
      }
    }
    for (auto it = redundant.rbegin(); it != redundant.rend(); ++it) {
      rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(*it));
      basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(*it));
    }
    return true;
  }

  LpStatus phase_two(const std::vector<Rational>& cost) {
    for (std::size_t j = 0; j < columns_; ++j) cost_[j] = Scalar<T>::make(cost[j]);
    cost_[columns_] = T(0);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const T cb = Scalar<T>::make(cost[basis_[i]]);
      if (Scalar<T>::zero(cb, 0.0)) continue;
      for (std::size_t j = 0; j <= columns_; ++j) {
        if (!Scalar<T>::zero(rows_[i][j], 0.0)) cost_[j] -= cb * rows_[i][j];
      }
    }
    return run();
  }

  std::vector<T> primal() const {
    std::vector<T> y(columns_, T(0));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (!artificial(basis_[i])) y[basis_[i]] = rows_[i][columns_];
    }
    return y;
  }

 private:
  bool artificial(std::size_t var) const { return var >= columns_; }

  LpStatus run() {
    for (;;) {
      // Bland: lowest-index improving column
      std::size_t entering = columns_;
      for (std::size_t j = 0; j < columns_; ++j) {
        if (Scalar<T>::negative(cost_[j], tol_)) {
          entering = j;
          break;
        }
      }
      if (entering == columns_) return LpStatus::Optimal;

      std::size_t leaving = rows_.size();
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        const T& a = rows_[i][entering];
        if (!Scalar<T>::positive(a, tol_)) continue;
        if (leaving == rows_.size()) {
          leaving = i;
          continue;
        }
        const T& b = rows_[i][columns_];
        const T& best_a = rows_[leaving][entering];
        const T& best_b = rows_[leaving][columns_];
        if (Scalar<T>::ratio_less(b, a, best_b, best_a) ||
            (Scalar<T>::ratio_equal(b, a, best_b, best_a) && basis_[i] < basis_[leaving])) {
          leaving = i;
        }
      }
      if (leaving == rows_.size()) return LpStatus::Unbounded;
      pivot(leaving, entering);
      if (++iterations_ > max_iterations_) throw LpError("simplex iteration limit exceeded");
    }
  }

  void pivot(std::size_t r, std::size_t q) {
    auto& pr = rows_[r];
    const T pivot_value = pr[q];
    nonzero_.clear();
    for (std::size_t j = 0; j <= columns_; ++j) {
      if (!Scalar<T>::zero(pr[j], 0.0)) nonzero_.push_back(j);
    }
    for (auto j : nonzero_) pr[j] /= pivot_value;
    pr[q] = T(1);

    auto eliminate = [&](std::vector<T>& row) {
      if (Scalar<T>::zero(row[q], 0.0)) return;
      const T factor = row[q];
      for (auto j : nonzero_) {
        row[j] -= factor * pr[j];
        Scalar<T>::clean(row[j], tol_);
      }
      row[q] = T(0);
    };
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i != r) eliminate(rows_[i]);
    }
    eliminate(cost_);
    basis_[r] = q;
  }

  std::size_t columns_;
  double tol_;
  std::size_t max_iterations_;
  std::size_t iterations_ = 0;
  std::vector<std::vector<T>> rows_;
  std::vector<std::size_t> basis_;
  std::vector<T> cost_;
  std::vector<std::size_t> nonzero_;
};

template <typename T>
LpSolution solve_with(const LinearProgram& lp, const StandardForm& form,
                      const SolveOptions& options, Arithmetic arithmetic) {
  LpSolution solution;
  solution.arithmetic = arithmetic;
  if (form.trivially_infeasible) {
    solution.status = LpStatus::Infeasible;
    return solution;
  }

  Tableau<T> tableau(form, options.float_tolerance, options.max_iterations);
  if (!tableau.phase_one()) {
    solution.status = LpStatus::Infeasible;
    solution.iterations = tableau.iterations();
    return solution;
  }
  solution.status = tableau.phase_two(form.cost);
  solution.iterations = tableau.iterations();
  if (solution.status != LpStatus::Optimal) return solution;

  const auto y = tableau.primal();
  solution.values.reserve(lp.variables().size());
  for (const auto& m : form.maps) {
    switch (m.kind) {
      case ColumnMap::Shifted:
        solution.values.push_back(m.offset + Scalar<T>::exact(y[m.column]));
        break;
      case ColumnMap::Mirrored:
        solution.values.push_back(m.offset - Scalar<T>::exact(y[m.column]));
        break;
      case ColumnMap::Split:
        solution.values.push_back(Scalar<T>::exact(y[m.column]) -
                                  Scalar<T>::exact(y[m.negative_column]));
        break;
    }
  }
  for (std::size_t j = 0; j < solution.values.size(); ++j) {
    solution.objective += lp.objective()[j] * solution.values[j];
  }
  return solution;
}

std::string lp_number(const Rational& value) { return to_decimal(value); }

void write_terms(std::ostream& out, const LinearProgram& lp,
                 const std::vector<std::pair<std::size_t, Rational>>& terms) {
  if (terms.empty()) {
    out << " 0";
    return;
  }
  for (const auto& [var, coeff] : terms) {
    out << (sgn(coeff) < 0 ? " - " : " + ") << lp_number(abs(coeff)) << ' '
        << lp.variables()[var].name;
  }
}

}  // namespace

LpSolution solve(const LinearProgram& lp, const SolveOptions& options) {
  const auto form = to_standard_form(lp);
  if (options.arithmetic == Arithmetic::Rational) {
    return solve_with<Rational>(lp, form, options, Arithmetic::Rational);
  }
  return solve_with<double>(lp, form, options, Arithmetic::Float);
}

void write_lp(const LinearProgram& lp, std::ostream& out) {
  out << "\\ written by deltamap\n";
  out << (lp.sense() == Sense::Minimize ? "Minimize\n" : "Maximize\n") << " obj:";
  std::vector<std::pair<std::size_t, Rational>> objective;
  for (std::size_t j = 0; j < lp.objective().size(); ++j) {
    if (sgn(lp.objective()[j]) != 0) objective.emplace_back(j, lp.objective()[j]);
  }
  write_terms(out, lp, objective);
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < lp.constraints().size(); ++i) {
    const auto& c = lp.constraints()[i];
    std::vector<std::pair<std::size_t, Rational>> terms;
    for (const auto& t : c.terms) terms.emplace_back(t.variable, t.coefficient);
    out << ' ' << (c.name.empty() ? "c" + std::to_string(i + 1) : c.name) << ':';
    write_terms(out, lp, terms);
    switch (c.relation) {
      case Relation::Equal: out << " = "; break;
      case Relation::LessEqual: out << " <= "; break;
      case Relation::GreaterEqual: out << " >= "; break;
    }
    out << lp_number(c.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : lp.variables()) {
    if (!v.lower && !v.upper) {
      out << ' ' << v.name << " free\n";
    } else if (v.lower && v.upper) {
      out << ' ' << lp_number(*v.lower) << " <= " << v.name << " <= " << lp_number(*v.upper)
          << '\n';
    } else if (v.lower) {
      out << ' ' << v.name << " >= " << lp_number(*v.lower) << '\n';
    } else {
      out << " -inf <= " << v.name << " <= " << lp_number(*v.upper) << '\n';
    }
  }
  out << "End\n";
}

}  // namespace deltamap
