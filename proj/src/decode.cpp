#include "deltamap/decode.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "deltamap/deltadist.hpp"
#include "deltamap/relaxation.hpp"

namespace deltamap {

namespace {

constexpr std::size_t kUncapped = std::numeric_limits<std::size_t>::max();

// Overlaps of `scope` with the other members, expressed over the local sites
// 1..|scope|.
HypersiteSet local_overlaps(const HypersiteSet& front, const Hypersite& scope) {
  HypersiteSet overlaps;
  for (const auto& other : front) {
    if (other == scope) continue;
    const auto meet = scope.intersect(other);
    if (meet.empty()) continue;
    std::vector<int> local;
    for (int site : meet.sites()) local.push_back(static_cast<int>(scope.position(site)) + 1);
    overlaps.insert(Hypersite(std::move(local)));
  }
  return overlaps;
}

bool atomic_in(const HypersiteSet& front, const Hypersite& scope, std::span<const Rational> table,
               int labels) {
  const auto overlaps = local_overlaps(front, scope);
  if (overlaps.empty()) return true;
  const DenseFunction g(static_cast<int>(scope.size()), labels,
                        std::vector<Rational>(table.begin(), table.end()), kUncapped);
  return project(g, overlaps) != g;
}

// Advances `config` to the next vector in lexicographic order; false after the
// last one.
bool next_lex(std::vector<int>& config, int labels) {
  for (std::size_t k = config.size(); k-- > 0;) {
    if (++config[k] < labels) return true;
    config[k] = 0;
  }
  return false;
}

bool admissible(const Rational& value, const Rational& eps, bool negative) {
  return negative ? value < -eps : value > eps;
}

std::string render_config(const std::vector<int>& config) {
  std::string out;
  for (std::size_t k = 0; k < config.size(); ++k) {
    if (k) out += ' ';
    out += config[k] < 0 ? std::string("-") : std::to_string(config[k]);
  }
  return out;
}

ConditionedModel unconditioned(const Model& model) {
  std::vector<int> free(static_cast<std::size_t>(model.num_sites()));
  for (std::size_t i = 0; i < free.size(); ++i) free[i] = static_cast<int>(i) + 1;
  std::vector<int> fixed(free.size(), -1);
  return {model, std::move(free), std::move(fixed)};
}

}  // namespace

Rational support_threshold(std::span<const Rational> table, Arithmetic arithmetic) {
  if (arithmetic == Arithmetic::Rational) return Rational(0);
  Rational largest;
  for (const auto& v : table) largest = std::max(largest, Rational(abs(v)));
  return from_double(1e-7) * largest;
}

const char* to_string(Sign sign) { return sign == Sign::Inf ? "inf" : "sup"; }

DecodeFailure::DecodeFailure(std::size_t step, Hypersite scope,
                             std::vector<std::vector<int>> candidates, std::vector<int> partial)
    : Error("no admissible sub-sample for " + scope.to_string() + " at step " +
            std::to_string(step)),
      step_(step),
      scope_(std::move(scope)),
      candidates_(std::move(candidates)),
      partial_(std::move(partial)) {}

std::string failure_certificate(const Model& model, Sign sign, const DecodeFailure& failure) {
  std::ostringstream out;
  out << "decode-failure\n"
      << "instance " << fingerprint(model) << '\n'
      << "sign " << to_string(sign) << '\n'
      << "step " << failure.step() << '\n'
      << "hypersite " << failure.scope().to_string() << '\n'
      << "partial " << render_config(failure.partial()) << '\n'
      << "candidates " << failure.candidates().size() << '\n';
  for (const auto& c : failure.candidates()) out << "  " << render_config(c) << '\n';
  return out.str();
}

bool is_atomic(const Model& model, const Hypersite& scope) {
  const auto merged = merge_to_frontier(model);
  const auto* factor = merged.find(scope);
  if (factor == nullptr) {
    throw PreconditionError(scope.to_string() + " is not a frontier member of the model");
  }
  return atomic_in(merged.scopes(), scope, factor->values(), merged.num_labels());
}

HypersiteSet atomic_frontier(const Model& model) {
  const auto merged = merge_to_frontier(model);
  auto front = merged.scopes();
  const auto covered = front.sites();
  for (bool removed = true; removed;) {
    removed = false;
    for (const auto& s : front) {
      if (!atomic_in(front, s, merged.find(s)->values(), merged.num_labels())) {
        front.erase(Hypersite(s));
        removed = true;
        break;
      }
    }
  }
  if (front.sites() != covered) {
    auto lost = covered.minus(front.sites());
    throw DecodeUnsupported("atomic frontier no longer covers sites " + lost.to_string());
  }
  return front;
}

Assignment greedy_decode(const MarginalSet& marginals, const Model& model, Sign sign,
                         const DecodeOptions& options) {
  const auto front = atomic_frontier(model);
  const int L = model.num_labels();
  const bool negative = options.delta && sign == Sign::Sup;
  const std::size_t target = front.sites().size();

  std::vector<int> x(static_cast<std::size_t>(model.num_sites()), -1);
  std::size_t fixed = 0;
  std::size_t step = 0;
  for (const auto& s : front) {
    ++step;
    if (fixed == target) break;
    if (std::all_of(s.sites().begin(), s.sites().end(), [&](int i) { return x[i - 1] >= 0; })) {
      continue;
    }
    auto it = marginals.tables.find(s);
    if (it == marginals.tables.end() || it->second.size() != table_size(L, s.size())) {
      throw PreconditionError("marginal table for " + s.to_string() + " is missing or malformed");
    }
    const auto& table = it->second;
    const auto eps = support_threshold(table, options.arithmetic);

    std::vector<int> config(s.size(), 0);
    std::vector<std::vector<int>> candidates;
    bool found = false;
    do {
      if (!admissible(table[encode_local(config, L)], eps, negative)) continue;
      bool agrees = true;
      for (std::size_t k = 0; k < s.size() && agrees; ++k) {
        const int current = x[s[k] - 1];
        agrees = current < 0 || current == config[k];
      }
      if (agrees) {
        found = true;
        break;
      }
      candidates.push_back(config);
    } while (next_lex(config, L));

    if (!found) throw DecodeFailure(step, s, std::move(candidates), x);
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (x[s[k] - 1] < 0) ++fixed;
      x[s[k] - 1] = config[k];
    }
  }
  for (auto& label : x) label = std::max(label, 0);
  return x;
}

Assignment ConditionedModel::expand(const Assignment& reduced) const {
  if (reduced.size() != free_sites.size()) {
    throw InvalidAssignment("reduced assignment has " + std::to_string(reduced.size()) +
                            " labels, expected " + std::to_string(free_sites.size()));
  }
  Assignment x = fixed;
  for (std::size_t i = 0; i < reduced.size(); ++i) x[free_sites[i] - 1] = reduced[i];
  return x;
}

ConditionedModel conditioned_resolve(const Model& model, const Hypersite& scope,
                                     const std::vector<int>& config) {
  const int L = model.num_labels();
  if (config.size() != scope.size()) {
    throw InvalidAssignment("clamp configuration size does not match " + scope.to_string());
  }
  if (!scope.empty() && scope.sites().back() > model.num_sites()) {
    throw InvalidAssignment("clamp scope " + scope.to_string() + " exceeds the model");
  }
  for (int label : config) {
    if (label < 0 || label >= L) throw InvalidAssignment("clamp label out of range");
  }

  const auto n = static_cast<std::size_t>(model.num_sites());
  std::vector<int> fixed(n, -1);
  for (std::size_t k = 0; k < scope.size(); ++k) fixed[scope[k] - 1] = config[k];
  std::vector<int> free_sites;
  std::vector<int> renumber(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    if (fixed[i - 1] >= 0) continue;
    free_sites.push_back(static_cast<int>(i));
    renumber[i] = static_cast<int>(free_sites.size());
  }

  std::vector<FactorTable> factors;
  for (const auto& f : model.factors()) {
    const auto kept = f.scope().minus(scope);
    const auto rmap = restriction_map(f.scope(), kept, L);
    std::vector<Rational> values(table_size(L, kept.size()));
    for (std::size_t k = 0; k < f.values().size(); ++k) {
      const auto local = decode_local(k, f.scope().size(), L);
      bool matches = true;
      for (std::size_t j = 0; j < local.size() && matches; ++j) {
        const int clamp = fixed[f.scope()[j] - 1];
        matches = clamp < 0 || clamp == local[j];
      }
      if (matches) values[rmap[k]] = f[k];
    }
    std::vector<int> sites;
    for (int site : kept.sites()) sites.push_back(renumber[site]);
    factors.emplace_back(Hypersite(std::move(sites)), std::move(values));
  }
  return {Model(static_cast<int>(free_sites.size()), L, std::move(factors)),
          std::move(free_sites), std::move(fixed)};
}

ConditionedModel conditioned_resolve(const ConditionedModel& base, const Hypersite& scope,
                                     const std::vector<int>& config) {
  auto step = conditioned_resolve(base.model, scope, config);
  ConditionedModel result{std::move(step.model), {}, base.fixed};
  for (int site : step.free_sites) result.free_sites.push_back(base.free_sites[site - 1]);
  for (std::size_t i = 0; i < step.fixed.size(); ++i) {
    if (step.fixed[i] >= 0) result.fixed[base.free_sites[i] - 1] = step.fixed[i];
  }
  return result;
}

Assignment resolve_by_conditioning(const Model& model, Sign sign, const SolveOptions& options) {
  auto current = unconditioned(model);
  while (!current.free_sites.empty()) {
    const auto merged = merge_to_frontier(current.model);
    const auto front = merged.scopes();
    auto first = std::find_if(front.begin(), front.end(),
                              [](const Hypersite& s) { return !s.empty(); });
    if (first == front.end()) {
      return current.expand(Assignment(current.free_sites.size(), 0));
    }
    auto relax = build_pseudo(merged, sign == Sign::Inf ? ProblemKind::Min : ProblemKind::Max);
    const auto solution = solve(relax.lp, options);
    if (!solution.optimal()) {
      throw LpError(std::string("conditioned LP is ") + to_string(solution.status));
    }
    const auto marginals = extract_marginals(solution, relax.variables);
    const auto& table = marginals.at(*first);
    const auto eps = support_threshold(table, options.arithmetic);
    std::vector<int> config(first->size(), 0);
    while (!admissible(table[encode_local(config, merged.num_labels())], eps, false)) {
      if (!next_lex(config, merged.num_labels())) {
        throw LpError("conditioned LP left " + first->to_string() + " without support");
      }
    }
    current = conditioned_resolve(current, *first, config);
  }
  return current.expand({});
}

}  // namespace deltamap
