#include "deltamap/model.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>

#include "deltamap/errors.hpp"

namespace deltamap {

bool FactorTable::is_constant() const {
  return std::all_of(values_.begin(), values_.end(),
                     [&](const Rational& v) { return v == values_.front(); });
}

Model::Model(int sites, int labels, std::vector<FactorTable> factors)
    : sites_(sites), labels_(labels) {
  if (sites < 0) throw ModelError("site count must be non-negative");
  if (labels < 2) throw ModelError("label count must be at least 2");

  std::map<Hypersite, std::vector<Rational>> merged;
  for (auto& factor : factors) {
    const auto& scope = factor.scope();
    if (!scope.empty() && scope.sites().back() > sites) {
      throw ModelError("factor scope " + scope.to_string() + " exceeds site count " +
                       std::to_string(sites));
    }
    if (factor.values().size() != table_size(labels, scope.size())) {
      throw ModelError("factor " + scope.to_string() + " has " +
                       std::to_string(factor.values().size()) + " values, expected " +
                       std::to_string(table_size(labels, scope.size())));
    }
    auto [it, fresh] = merged.try_emplace(scope, factor.mutable_values());
    if (!fresh) {
      for (std::size_t k = 0; k < it->second.size(); ++k) it->second[k] += factor[k];
    }
  }
  factors_.reserve(merged.size());
  for (auto& [scope, values] : merged) factors_.emplace_back(scope, std::move(values));
}

const FactorTable* Model::find(const Hypersite& scope) const {
  auto it = std::lower_bound(
      factors_.begin(), factors_.end(), scope,
      [](const FactorTable& f, const Hypersite& s) { return f.scope() < s; });
  if (it == factors_.end() || it->scope() != scope) return nullptr;
  return &*it;
}

HypersiteSet Model::scopes() const {
  HypersiteSet set;
  for (const auto& f : factors_) set.insert(f.scope());
  return set;
}

void check_assignment(const Model& model, std::span<const int> x) {
  if (x.size() != static_cast<std::size_t>(model.num_sites())) {
    throw InvalidAssignment("assignment has " + std::to_string(x.size()) +
                            " labels, model has " + std::to_string(model.num_sites()) +
                            " sites");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] >= model.num_labels()) {
      throw InvalidAssignment("label " + std::to_string(x[i]) + " at site " +
                              std::to_string(i + 1) + " is out of range");
    }
  }
}

Rational evaluate(const Model& model, std::span<const int> x) {
  check_assignment(model, x);
  Rational total;
  for (const auto& f : model.factors()) {
    total += f[scope_index(f.scope(), x, model.num_labels())];
  }
  return total;
}

ModelDiagnostics validate(const Model& model) {
  ModelDiagnostics diagnostics;
  const auto covered = model.scopes().sites();
  for (int site = 1; site <= model.num_sites(); ++site) {
    if (!covered.contains(site)) diagnostics.uncovered_sites.push_back(site);
  }
  diagnostics.covers = diagnostics.uncovered_sites.empty();
  for (const auto& f : model.factors()) {
    if (f.is_constant()) diagnostics.constant_factors.push_back(f.scope());
  }
  return diagnostics;
}

Model merge_to_frontier(const Model& model) {
  if (model.factors().empty()) return model;
  const auto scopes = model.scopes();
  const auto front = frontier(scopes);
  const auto anc = ancestry(scopes);

  std::map<Hypersite, std::vector<Rational>> tables;
  for (const auto& f : model.factors()) {
    if (front.contains(f.scope())) {
      tables[f.scope()] = std::vector<Rational>(f.values().begin(), f.values().end());
    }
  }
  for (const auto& f : model.factors()) {
    if (front.contains(f.scope())) continue;
    const auto& target = anc.at(f.scope());
    const auto lifted = broadcast_table(f.values(), f.scope(), target, model.num_labels());
    auto& table = tables.at(target);
    for (std::size_t k = 0; k < table.size(); ++k) table[k] += lifted[k];
  }

  std::vector<FactorTable> factors;
  for (auto& [scope, values] : tables) factors.emplace_back(scope, std::move(values));
  return Model(model.num_sites(), model.num_labels(), std::move(factors));
}

bool is_frontier_form(const Model& model) {
  if (model.factors().empty()) return true;
  const auto scopes = model.scopes();
  return frontier(scopes) == scopes;
}

Assignment assignment_at(std::size_t index, int sites, int labels) {
  return decode_local(index, static_cast<std::size_t>(sites), labels);
}

std::string fingerprint(const Model& model) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto feed = [&](const std::string& text) {
    for (unsigned char c : text) {
      hash ^= c;
      hash *= 0x100000001b3ULL;
    }
    hash ^= 0xff;
    hash *= 0x100000001b3ULL;
  };
  feed(std::to_string(model.num_sites()));
  feed(std::to_string(model.num_labels()));
  for (const auto& f : model.factors()) {
    feed(f.scope().to_string());
    for (const auto& v : f.values()) feed(to_string(v));
  }
  char digits[17];
  std::snprintf(digits, sizeof digits, "%016llx", static_cast<unsigned long long>(hash));
  return digits;
}

}  // namespace deltamap
