#include "deltamap/orthomarginal.hpp"

#include <cstdlib>
#include <string>

#include "deltamap/errors.hpp"

namespace deltamap {

namespace {

Hypersite all_sites(int n) {
  std::vector<int> sites(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) sites[static_cast<std::size_t>(i)] = i + 1;
  return Hypersite(std::move(sites));
}

std::string describe(const Hypersite& a, const Hypersite& b, const Hypersite& onto) {
  return a.to_string() + " and " + b.to_string() + " disagree on margin " + onto.to_string();
}

// Tables for every closure member, each obtained from every frontier superset.
// Disagreement means there is no global function with these margins.
std::map<Hypersite, std::vector<Rational>> closure_tables(const MarginalSet& tables,
                                                          const HypersiteSet& front,
                                                          const HypersiteSet& closure) {
  std::map<Hypersite, std::vector<Rational>> result;
  for (const auto& c : closure) {
    const Hypersite* source = nullptr;
    for (const auto& t : front) {
      if (!c.is_subset_of(t)) continue;
      auto table = marginalize_table(tables.at(t), t, c, tables.labels);
      auto [it, fresh] = result.try_emplace(c, table);
      if (fresh) {
        source = &t;
      } else if (it->second != table) {
        throw PreconditionError("pseudo-marginals are not liftable: " +
                                describe(*source, t, c));
      }
    }
  }
  return result;
}

}  // namespace

std::size_t dense_cap() {
  if (const char* env = std::getenv("DELTAMAP_DENSE_CAP")) {
    try {
      return static_cast<std::size_t>(std::stoull(env));
    } catch (const std::exception&) {
      // fall through to the default
    }
  }
  return kDefaultDenseCap;
}

DenseFunction::DenseFunction(int sites, int labels, std::size_t cap)
    : sites_(sites), labels_(labels) {
  const auto size = table_size(labels, static_cast<std::size_t>(sites));
  if (size > cap) {
    throw SizeError("dense table of " + std::to_string(size) + " entries exceeds cap " +
                    std::to_string(cap));
  }
  values_.resize(size);
}

DenseFunction::DenseFunction(int sites, int labels, std::vector<Rational> values,
                             std::size_t cap)
    : DenseFunction(sites, labels, cap) {
  if (values.size() != values_.size()) {
    throw PreconditionError("dense table length " + std::to_string(values.size()) +
                            " does not match L^n = " + std::to_string(values_.size()));
  }
  values_ = std::move(values);
}

HypersiteSet MarginalSet::scopes() const {
  HypersiteSet set;
  for (const auto& [scope, table] : tables) set.insert(scope);
  return set;
}

std::vector<Rational> margin(const DenseFunction& f, const Hypersite& c) {
  if (!c.empty() && c.sites().back() > f.num_sites()) {
    throw PreconditionError(c.to_string() + " is not a subset of the sites");
  }
  return marginalize_table(f.values(), all_sites(f.num_sites()), c, f.num_labels());
}

MarginalSet margins(const DenseFunction& f, const HypersiteSet& set) {
  MarginalSet result{f.num_sites(), f.num_labels(), {}};
  for (const auto& c : set) result.tables.emplace(c, margin(f, c));
  return result;
}

DenseFunction project(const DenseFunction& f, const HypersiteSet& set) {
  const auto closure = frontier_closure(set);
  const auto rho = rho_coefficients(closure, frontier(set));
  const auto full = all_sites(f.num_sites());

  DenseFunction result(f.num_sites(), f.num_labels(), f.size());
  for (const auto& [c, weight] : rho) {
    if (weight == 0) continue;
    const auto fc = margin(f, c);
    const Rational scale(Rational(static_cast<long>(weight)) /
                         power(f.num_labels(), static_cast<std::size_t>(f.num_sites()) - c.size()));
    const auto map = restriction_map(full, c, f.num_labels());
    for (std::size_t x = 0; x < result.size(); ++x) result[x] += scale * fc[map[x]];
  }
  return result;
}

Rational inner_product(const DenseFunction& f, const DenseFunction& g) {
  if (f.size() != g.size()) throw PreconditionError("inner product of mismatched functions");
  Rational total;
  for (std::size_t x = 0; x < f.size(); ++x) total += f[x] * g[x];
  return total;
}

ConsistencyReport check_pseudo_marginals(const MarginalSet& tables) {
  ConsistencyReport report;
  if (tables.tables.empty()) return report;
  for (const auto& [scope, table] : tables.tables) {
    if (table.size() != table_size(tables.labels, scope.size())) {
      report.consistent = false;
      report.violations.push_back("table " + scope.to_string() + " has wrong length");
    }
  }
  if (!report.consistent) return report;

  const auto scopes = tables.scopes();
  const auto front = frontier(scopes);
  const auto& members = front.members();
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      const auto meet = members[a].intersect(members[b]);
      if (meet.empty()) continue;
      if (marginalize_table(tables.at(members[a]), members[a], meet, tables.labels) !=
          marginalize_table(tables.at(members[b]), members[b], meet, tables.labels)) {
        report.consistent = false;
        report.violations.push_back(describe(members[a], members[b], meet));
      }
    }
  }
  for (const auto& [c, parent] : ancestry(scopes)) {
    if (tables.at(c) != marginalize_table(tables.at(parent), parent, c, tables.labels)) {
      report.consistent = false;
      report.violations.push_back(c.to_string() + " differs from the margin of its ancestor " +
                                  parent.to_string());
    }
  }
  return report;
}

DenseFunction lift(const MarginalSet& tables, const DenseFunction& v) {
  if (tables.sites != v.num_sites() || tables.labels != v.num_labels()) {
    throw PreconditionError("lift: marginal set and base function have different shapes");
  }
  if (auto report = check_pseudo_marginals(tables); !report) {
    throw PreconditionError("lift: inconsistent pseudo-marginals (" +
                            report.violations.front() + ")");
  }
  const auto scopes = tables.scopes();
  const auto front = frontier(scopes);
  const auto closure = frontier_closure(scopes);
  const auto rho = rho_coefficients(closure, front);
  const auto local = closure_tables(tables, front, closure);
  const auto full = all_sites(v.num_sites());

  DenseFunction result = v;
  const auto projected = project(v, scopes);
  for (std::size_t x = 0; x < result.size(); ++x) result[x] -= projected[x];
  for (const auto& [c, weight] : rho) {
    if (weight == 0) continue;
    const auto& uc = local.at(c);
    const Rational scale(Rational(static_cast<long>(weight)) /
                         power(v.num_labels(), static_cast<std::size_t>(v.num_sites()) - c.size()));
    const auto map = restriction_map(full, c, v.num_labels());
    for (std::size_t x = 0; x < result.size(); ++x) result[x] += scale * uc[map[x]];
  }
  return result;
}

}  // namespace deltamap
