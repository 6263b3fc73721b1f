#include "deltamap/relaxation.hpp"

#include <functional>
#include <numeric>

#include "deltamap/deltadist.hpp"
#include "deltamap/errors.hpp"

namespace deltamap {

namespace {

const char* role_prefix(VarRole role) {
  switch (role) {
    case VarRole::LocalProb: return "p";
    case VarRole::LocalPos: return "a";
    case VarRole::LocalNeg: return "b";
    case VarRole::LocalFree: return "q";
    case VarRole::GlobalProb: return "P";
    case VarRole::GlobalPos: return "A";
    case VarRole::GlobalNeg: return "B";
    case VarRole::GlobalFree: return "Q";
    case VarRole::CapPos: return "ca";
    case VarRole::CapNeg: return "cb";
  }
  return "v";
}

bool is_global(VarRole role) {
  return role == VarRole::GlobalProb || role == VarRole::GlobalPos ||
         role == VarRole::GlobalNeg || role == VarRole::GlobalFree;
}

Hypersite all_sites(int n) {
  std::vector<int> sites(static_cast<std::size_t>(n));
  std::iota(sites.begin(), sites.end(), 1);
  return Hypersite(std::move(sites));
}

// Column ids of one local table, in little-endian order.
using Columns = std::vector<std::size_t>;

Columns add_table(LinearProgram& lp, VariableMap& vars, VarRole role, const Hypersite& scope,
                  std::size_t size, std::optional<Rational> lower) {
  Columns cols(size);
  for (std::size_t k = 0; k < size; ++k) cols[k] = vars.add(lp, {role, scope, k}, lower);
  return cols;
}

// A table whose value is sum_k sign_k * column_k[x] (one column for p, two for a - b).
struct SignedTable {
  std::vector<std::pair<Columns, int>> parts;
};

void append(std::vector<LpTerm>& row, const SignedTable& table, std::size_t index, int sign) {
  for (const auto& [cols, s] : table.parts) row.push_back({cols[index], Rational(sign * s)});
}

// Overlap consistency: margins of adjacent frontier tables agree on the
// shared sites.
void add_overlap_rows(LinearProgram& lp, const HypersiteSet& front,
                      const std::map<Hypersite, SignedTable>& tables, int labels) {
  const auto& members = front.members();
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      const auto meet = members[a].intersect(members[b]);
      if (meet.empty()) continue;
      const auto map_a = restriction_map(members[a], meet, labels);
      const auto map_b = restriction_map(members[b], meet, labels);
      std::vector<std::vector<LpTerm>> rows(table_size(labels, meet.size()));
      for (std::size_t x = 0; x < map_a.size(); ++x) append(rows[map_a[x]], tables.at(members[a]), x, 1);
      for (std::size_t x = 0; x < map_b.size(); ++x) append(rows[map_b[x]], tables.at(members[b]), x, -1);
      for (std::size_t y = 0; y < rows.size(); ++y) {
        lp.add_constraint("ov_" + std::to_string(a) + "_" + std::to_string(b) + "_y" +
                              std::to_string(y),
                          std::move(rows[y]), Relation::Equal, Rational(0));
      }
    }
  }
}

// One representative per connected component of the overlap graph.
std::vector<bool> component_leaders(const HypersiteSet& front) {
  const auto& m = front.members();
  std::vector<std::size_t> parent(m.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> root = [&](std::size_t i) {
    return parent[i] == i ? i : parent[i] = root(parent[i]);
  };
  for (std::size_t a = 0; a < m.size(); ++a) {
    for (std::size_t b = a + 1; b < m.size(); ++b) {
      if (!m[a].intersect(m[b]).empty()) parent[root(b)] = root(a);
    }
  }
  std::vector<bool> leader(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) leader[i] = root(i) == i;
  return leader;
}

void require_frontier_form(const Model& model) {
  if (!is_frontier_form(model)) {
    throw PreconditionError("local relaxations need a frontier-form model; apply merge_to_frontier");
  }
}

}  // namespace

const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Min: return "min";
    case ProblemKind::Max: return "max";
    case ProblemKind::Delta: return "delta";
  }
  return "unknown";
}

std::size_t VariableMap::add(LinearProgram& lp, VarRef ref, std::optional<Rational> lower) {
  auto name = name_of(ref);
  const auto id = lp.add_variable(name, std::move(lower));
  if (id != refs_.size()) throw LpError("variable map out of sync with its program");
  by_name_.emplace(std::move(name), id);
  refs_.push_back(std::move(ref));
  return id;
}

std::optional<std::size_t> VariableMap::find(const VarRef& ref) const {
  auto it = by_name_.find(name_of(ref));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::string VariableMap::name_of(const VarRef& ref) {
  std::string name = role_prefix(ref.role);
  for (int site : ref.scope.sites()) name += "_" + std::to_string(site);
  name += "_x" + std::to_string(ref.config);
  return name;
}

Relaxation build_pseudo(const Model& model, ProblemKind kind, const BuildOptions& options) {
  require_frontier_form(model);
  const int L = model.num_labels();
  const auto front = model.scopes();

  Relaxation relax{LinearProgram(kind == ProblemKind::Max ? Sense::Maximize : Sense::Minimize),
                   VariableMap(model.num_sites(), L, front), kind};
  auto& lp = relax.lp;

  std::map<Hypersite, SignedTable> tables;
  for (const auto& f : model.factors()) {
    const auto size = f.values().size();
    SignedTable table;
    if (kind == ProblemKind::Delta) {
      auto pos = add_table(lp, relax.variables, VarRole::LocalPos, f.scope(), size, Rational(0));
      auto neg = add_table(lp, relax.variables, VarRole::LocalNeg, f.scope(), size, Rational(0));
      for (std::size_t k = 0; k < size; ++k) {
        lp.add_objective(pos[k], f[k]);
        lp.add_objective(neg[k], -f[k]);
      }
      table.parts = {{std::move(pos), 1}, {std::move(neg), -1}};
    } else {
      auto cols = add_table(lp, relax.variables, VarRole::LocalProb, f.scope(), size, Rational(0));
      for (std::size_t k = 0; k < size; ++k) lp.add_objective(cols[k], f[k]);
      table.parts = {{std::move(cols), 1}};
    }
    tables.emplace(f.scope(), std::move(table));
  }

  if (front.empty()) return relax;
  add_overlap_rows(lp, front, tables, L);

  const auto leaders = component_leaders(front);
  const auto& members = front.members();
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& table = tables.at(members[i]);
    const auto size = table.parts.front().first.size();
    const auto tag = members[i].to_string();
    if (!options.reduce || leaders[i]) {
      std::vector<LpTerm> row;
      for (std::size_t k = 0; k < size; ++k) append(row, table, k, 1);
      lp.add_constraint("norm" + tag, std::move(row), Relation::Equal,
                        Rational(kind == ProblemKind::Delta ? 0 : 1));
    }
    if (kind == ProblemKind::Delta) {
      std::vector<LpTerm> cap;
      for (const auto& [cols, s] : table.parts) {
        for (auto c : cols) cap.push_back({c, Rational(1)});
      }
      lp.add_constraint("cap" + tag, std::move(cap), Relation::LessEqual, Rational(2));
    }
  }
  return relax;
}

Relaxation build_pseudo_emin(const Model& model, const BuildOptions& options) {
  return build_pseudo(model, ProblemKind::Min, options);
}

Relaxation build_pseudo_emax(const Model& model, const BuildOptions& options) {
  return build_pseudo(model, ProblemKind::Max, options);
}

Relaxation build_pseudo_delta_emin(const Model& model, const BuildOptions& options) {
  return build_pseudo(model, ProblemKind::Delta, options);
}

Relaxation build_exact_em(const Model& model, ProblemKind kind, std::size_t cap) {
  const int L = model.num_labels();
  const auto total = table_size(L, static_cast<std::size_t>(model.num_sites()));
  if (total > cap) {
    throw SizeError("exact LP needs " + std::to_string(total) + " joint entries, cap is " +
                    std::to_string(cap));
  }
  const auto scopes = model.scopes();
  Relaxation relax{LinearProgram(kind == ProblemKind::Max ? Sense::Maximize : Sense::Minimize),
                   VariableMap(model.num_sites(), L, scopes), kind};
  auto& lp = relax.lp;

  SignedTable joint;
  if (kind == ProblemKind::Delta) {
    joint.parts = {
        {add_table(lp, relax.variables, VarRole::GlobalPos, Hypersite{}, total, Rational(0)), 1},
        {add_table(lp, relax.variables, VarRole::GlobalNeg, Hypersite{}, total, Rational(0)), -1}};
  } else {
    joint.parts = {
        {add_table(lp, relax.variables, VarRole::GlobalProb, Hypersite{}, total, Rational(0)), 1}};
  }

  const auto full = all_sites(model.num_sites());
  const VarRole local_role = kind == ProblemKind::Delta ? VarRole::LocalFree : VarRole::LocalProb;
  for (const auto& f : model.factors()) {
    const auto local = add_table(lp, relax.variables, local_role, f.scope(), f.values().size(),
                                 std::nullopt);
    for (std::size_t k = 0; k < local.size(); ++k) lp.add_objective(local[k], f[k]);
    const auto map = restriction_map(full, f.scope(), L);
    std::vector<std::vector<LpTerm>> rows(local.size());
    for (std::size_t k = 0; k < local.size(); ++k) rows[k].push_back({local[k], Rational(1)});
    for (std::size_t x = 0; x < total; ++x) append(rows[map[x]], joint, x, -1);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      lp.add_constraint("marg" + f.scope().to_string() + "_x" + std::to_string(k),
                        std::move(rows[k]), Relation::Equal, Rational(0));
    }
  }

  std::vector<LpTerm> sum;
  for (std::size_t x = 0; x < total; ++x) append(sum, joint, x, 1);
  lp.add_constraint("total", std::move(sum), Relation::Equal,
                    Rational(kind == ProblemKind::Delta ? 0 : 1));
  if (kind == ProblemKind::Delta) {
    std::vector<LpTerm> l1;
    for (const auto& [cols, s] : joint.parts) {
      for (auto c : cols) l1.push_back({c, Rational(1)});
    }
    lp.add_constraint("l1", std::move(l1), Relation::LessEqual, Rational(2));
  }
  return relax;
}

Relaxation build_global_pseudo(const Model& model, ProblemKind kind, std::size_t cap) {
  const int L = model.num_labels();
  const auto total = table_size(L, static_cast<std::size_t>(model.num_sites()));
  if (total > cap) {
    throw SizeError("global LP needs " + std::to_string(total) + " joint entries, cap is " +
                    std::to_string(cap));
  }
  const auto front = model.factors().empty() ? HypersiteSet{} : frontier(model.scopes());
  Relaxation relax{LinearProgram(kind == ProblemKind::Max ? Sense::Maximize : Sense::Minimize),
                   VariableMap(model.num_sites(), L, front), kind};
  auto& lp = relax.lp;

  const VarRole role = kind == ProblemKind::Delta ? VarRole::GlobalFree : VarRole::GlobalProb;
  const auto joint = add_table(lp, relax.variables, role, Hypersite{}, total, std::nullopt);
  for (std::size_t x = 0; x < total; ++x) {
    lp.add_objective(joint[x], evaluate(model, assignment_at(x, model.num_sites(), L)));
  }

  const auto full = all_sites(model.num_sites());
  for (const auto& s : front) {
    const auto map = restriction_map(full, s, L);
    const auto size = table_size(L, s.size());
    std::vector<std::vector<LpTerm>> rows(size);
    for (std::size_t x = 0; x < total; ++x) rows[map[x]].push_back({joint[x], Rational(1)});
    if (kind == ProblemKind::Delta) {
      const auto pos = add_table(lp, relax.variables, VarRole::CapPos, s, size, Rational(0));
      const auto neg = add_table(lp, relax.variables, VarRole::CapNeg, s, size, Rational(0));
      std::vector<LpTerm> l1;
      for (std::size_t k = 0; k < size; ++k) {
        rows[k].push_back({pos[k], Rational(-1)});
        rows[k].push_back({neg[k], Rational(1)});
        lp.add_constraint("split" + s.to_string() + "_x" + std::to_string(k), std::move(rows[k]),
                          Relation::Equal, Rational(0));
        l1.push_back({pos[k], Rational(1)});
        l1.push_back({neg[k], Rational(1)});
      }
      lp.add_constraint("cap" + s.to_string(), std::move(l1), Relation::LessEqual, Rational(2));
    } else {
      for (std::size_t k = 0; k < size; ++k) {
        lp.add_constraint("nonneg" + s.to_string() + "_x" + std::to_string(k),
                          std::move(rows[k]), Relation::GreaterEqual, Rational(0));
      }
    }
  }

  std::vector<LpTerm> sum;
  for (auto c : joint) sum.push_back({c, Rational(1)});
  lp.add_constraint("total", std::move(sum), Relation::Equal,
                    Rational(kind == ProblemKind::Delta ? 0 : 1));
  return relax;
}

Relaxation build_min_l1_completion(const DeltaMarginalSet& tables, std::size_t cap) {
  if (auto report = check_pseudo_marginals(tables); !report) {
    throw PreconditionError("min-L1 completion: inconsistent delta-marginals (" +
                            report.violations.front() + ")");
  }
  const int L = tables.labels;
  const auto front = tables.tables.empty() ? HypersiteSet{} : frontier(tables.scopes());
  for (const auto& s : front) {
    if (sgn(total(tables.at(s))) != 0) {
      throw PreconditionError("min-L1 completion: table " + s.to_string() + " does not sum to 0");
    }
  }
  const auto size = table_size(L, static_cast<std::size_t>(tables.sites));
  if (size > cap) {
    throw SizeError("completion LP needs " + std::to_string(size) + " joint entries, cap is " +
                    std::to_string(cap));
  }

  Relaxation relax{LinearProgram(Sense::Minimize), VariableMap(tables.sites, L, front),
                   ProblemKind::Delta};
  auto& lp = relax.lp;
  SignedTable joint;
  joint.parts = {
      {add_table(lp, relax.variables, VarRole::GlobalPos, Hypersite{}, size, Rational(0)), 1},
      {add_table(lp, relax.variables, VarRole::GlobalNeg, Hypersite{}, size, Rational(0)), -1}};
  for (const auto& [cols, s] : joint.parts) {
    for (auto c : cols) lp.add_objective(c, Rational(1));
  }

  const auto full = all_sites(tables.sites);
  for (const auto& s : front) {
    const auto map = restriction_map(full, s, L);
    const auto& target = tables.at(s);
    std::vector<std::vector<LpTerm>> rows(target.size());
    for (std::size_t x = 0; x < size; ++x) append(rows[map[x]], joint, x, 1);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      lp.add_constraint("marg" + s.to_string() + "_x" + std::to_string(k), std::move(rows[k]),
                        Relation::Equal, target[k]);
    }
  }
  return relax;
}

MarginalSet extract_marginals(const LpSolution& solution, const VariableMap& variables) {
  if (!solution.optimal()) {
    throw ExtractionError(std::string("cannot extract marginals from a ") +
                          to_string(solution.status) + " solution");
  }
  MarginalSet result{variables.sites(), variables.labels(), {}};
  bool has_local = false;
  for (std::size_t v = 0; v < variables.size(); ++v) {
    const auto& ref = variables[v];
    int sign = 0;
    switch (ref.role) {
      case VarRole::LocalProb:
      case VarRole::LocalPos:
      case VarRole::LocalFree: sign = 1; break;
      case VarRole::LocalNeg: sign = -1; break;
      default: break;
    }
    if (sign == 0) continue;
    has_local = true;
    auto& table = result.tables[ref.scope];
    if (table.empty()) table.resize(table_size(variables.labels(), ref.scope.size()));
    if (sign > 0) {
      table[ref.config] += solution.values[v];
    } else {
      table[ref.config] -= solution.values[v];
    }
  }
  if (has_local) return result;
  return margins(extract_global(solution, variables), variables.scopes());
}

DenseFunction extract_global(const LpSolution& solution, const VariableMap& variables) {
  if (!solution.optimal()) {
    throw ExtractionError(std::string("cannot extract a joint table from a ") +
                          to_string(solution.status) + " solution");
  }
  const auto size = table_size(variables.labels(), static_cast<std::size_t>(variables.sites()));
  DenseFunction joint(variables.sites(), variables.labels(), size);
  bool found = false;
  for (std::size_t v = 0; v < variables.size(); ++v) {
    const auto& ref = variables[v];
    if (!is_global(ref.role)) continue;
    found = true;
    if (ref.role == VarRole::GlobalNeg) {
      joint[ref.config] -= solution.values[v];
    } else {
      joint[ref.config] += solution.values[v];
    }
  }
  if (!found) throw ExtractionError("program has no joint-table columns");
  return joint;
}

}  // namespace deltamap
