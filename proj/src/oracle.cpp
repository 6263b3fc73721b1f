#include "deltamap/oracle.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "deltamap/decode.hpp"
#include "deltamap/deltadist.hpp"
#include "deltamap/errors.hpp"
#include "deltamap/io.hpp"
#include "deltamap/relaxation.hpp"

namespace deltamap {

namespace {

unsigned resolve_workers(unsigned workers) {
  if (workers != 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::size_t assignment_count(const Model& model, std::size_t cap) {
  const auto n = static_cast<std::size_t>(model.num_sites());
  const auto L = static_cast<std::size_t>(model.num_labels());
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (count > cap / L) {
      throw SizeError("enumeration over " + std::to_string(L) + "^" + std::to_string(n) +
                      " assignments exceeds the cap of " + std::to_string(cap));
    }
    count *= L;
  }
  if (count > cap) throw SizeError("enumeration exceeds the cap of " + std::to_string(cap));
  return count;
}

// Factor tables flattened for fast repeated evaluation. Integer tables of
// moderate magnitude take a machine-integer path.
class Evaluator {
 public:
  explicit Evaluator(const Model& model) : labels_(model.num_labels()) {
    constexpr long kLimit = 1'000'000'000'000L;
    for (const auto& f : model.factors()) {
      std::vector<std::size_t> sites;
      for (int s : f.scope().sites()) sites.push_back(static_cast<std::size_t>(s - 1));
      sites_.push_back(std::move(sites));
      rational_.emplace_back(f.values().begin(), f.values().end());
      std::vector<long> ints;
      for (const auto& v : f.values()) {
        if (!integral_) break;
        if (v.get_den() != 1 || abs(v.get_num()) > Rational(kLimit)) {
          integral_ = false;
          break;
        }
        ints.push_back(v.get_num().get_si());
      }
      integer_.push_back(std::move(ints));
    }
    if (sites_.size() > 1'000'000) integral_ = false;
  }

  bool integral() const noexcept { return integral_; }

  std::size_t index(std::size_t f, const std::vector<int>& x) const {
    std::size_t idx = 0;
    std::size_t stride = 1;
    for (std::size_t s : sites_[f]) {
      idx += static_cast<std::size_t>(x[s]) * stride;
      stride *= static_cast<std::size_t>(labels_);
    }
    return idx;
  }

  long integer_value(const std::vector<int>& x) const {
    long total = 0;
    for (std::size_t f = 0; f < sites_.size(); ++f) total += integer_[f][index(f, x)];
    return total;
  }

  Rational rational_value(const std::vector<int>& x) const {
    Rational total;
    for (std::size_t f = 0; f < sites_.size(); ++f) total += rational_[f][index(f, x)];
    return total;
  }

 private:
  int labels_;
  bool integral_ = true;
  std::vector<std::vector<std::size_t>> sites_;
  std::vector<std::vector<Rational>> rational_;
  std::vector<std::vector<long>> integer_;
};

void increment(std::vector<int>& x, int labels) {
  for (auto& label : x) {
    if (++label < labels) return;
    label = 0;
  }
}

template <typename Value, typename Eval>
ModesResult scan(const Model& model, std::size_t begin, std::size_t end, Eval eval) {
  auto x = assignment_at(begin, model.num_sites(), model.num_labels());
  Value lo{};
  Value hi{};
  ModesResult result;
  for (std::size_t i = begin; i < end; ++i, increment(x, model.num_labels())) {
    const Value v = eval(x);
    if (i == begin || v < lo) {
      lo = v;
      result.argmin.clear();
    }
    if (v == lo) result.argmin.push_back(x);
    if (i == begin || v > hi) {
      hi = v;
      result.argmax.clear();
    }
    if (v == hi) result.argmax.push_back(x);
  }
  result.min_value = Rational(lo);
  result.max_value = Rational(hi);
  std::sort(result.argmin.begin(), result.argmin.end());
  std::sort(result.argmax.begin(), result.argmax.end());
  return result;
}

std::vector<Assignment> merged_sets(const std::vector<Assignment>& a,
                                    const std::vector<Assignment>& b) {
  std::vector<Assignment> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Deterministic integer draws that do not depend on the standard library's
// distribution implementations.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  long uniform(long lo, long hi) {
    const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
    const auto limit = std::numeric_limits<std::uint64_t>::max() -
                       std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t v;
    do {
      v = rng_();
    } while (v >= limit);
    return lo + static_cast<long>(v % range);
  }

 private:
  std::mt19937_64 rng_;
};

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool same(const Rational& a, const Rational& b, Arithmetic arithmetic) {
  if (arithmetic == Arithmetic::Rational) return a == b;
  return abs(a - b) <= from_double(1e-6) * (1 + abs(a) + abs(b));
}

bool is_zero(const Rational& a, Arithmetic arithmetic) { return same(a, Rational(0), arithmetic); }

const char* kFamilyNames[] = {"chain", "tree", "cycle", "grid", "hypergraph", "zero"};

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) out += sep;
    out += parts[k];
  }
  return out;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

struct Solved {
  Rational value;
  MarginalSet marginals;
};

Solved solve_local(const Model& merged, ProblemKind kind, Arithmetic arithmetic) {
  auto relax = build_pseudo(merged, kind);
  SolveOptions options;
  options.arithmetic = arithmetic;
  const auto solution = solve(relax.lp, options);
  if (!solution.optimal()) {
    throw LpError(std::string(to_string(kind)) + " LP is " + to_string(solution.status));
  }
  return {solution.objective, extract_marginals(solution, relax.variables)};
}

SolutionSection solution_section(const char* name, const Solved& solved) {
  SolutionSection section;
  section.name = name;
  section.value = solved.value;
  section.marginals = solved.marginals.tables;
  return section;
}

// A factor that overlaps nothing and is constant: the objective cannot see its
// delta-marginal, so any zero-sum table of mass at most 2 is optimal.
bool isolated_constant(const Model& merged, const Hypersite& scope) {
  for (const auto& f : merged.factors()) {
    if (f.scope() != scope && !f.scope().intersect(scope).empty()) return false;
  }
  return merged.find(scope)->is_constant();
}

}  // namespace

ModesResult enumerate_range(const Model& model, std::size_t begin, std::size_t end) {
  if (begin >= end) throw PreconditionError("empty enumeration range");
  const Evaluator evaluator(model);
  if (evaluator.integral()) {
    return scan<long>(model, begin, end,
                           [&](const std::vector<int>& x) { return evaluator.integer_value(x); });
  }
  return scan<Rational>(model, begin, end,
                        [&](const std::vector<int>& x) { return evaluator.rational_value(x); });
}

ModesResult merge_modes(const ModesResult& a, const ModesResult& b) {
  ModesResult out;
  if (a.min_value < b.min_value) {
    out.min_value = a.min_value;
    out.argmin = a.argmin;
  } else if (b.min_value < a.min_value) {
    out.min_value = b.min_value;
    out.argmin = b.argmin;
  } else {
    out.min_value = a.min_value;
    out.argmin = merged_sets(a.argmin, b.argmin);
  }
  if (a.max_value > b.max_value) {
    out.max_value = a.max_value;
    out.argmax = a.argmax;
  } else if (b.max_value > a.max_value) {
    out.max_value = b.max_value;
    out.argmax = b.argmax;
  } else {
    out.max_value = a.max_value;
    out.argmax = merged_sets(a.argmax, b.argmax);
  }
  return out;
}

ModesResult enumerate_modes(const Model& model, const EnumerationOptions& options) {
  const auto total = assignment_count(model, options.cap);
  const auto workers = std::min<std::size_t>(resolve_workers(options.workers), total);
  if (workers <= 1) return enumerate_range(model, 0, total);

  std::vector<ModesResult> parts(workers);
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        parts[w] = enumerate_range(model, total * w / workers, total * (w + 1) / workers);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  auto result = parts.front();
  for (std::size_t w = 1; w < workers; ++w) result = merge_modes(result, parts[w]);
  return result;
}

MarginalSet exact_marginals(const DenseFunction& weights, const HypersiteSet& scopes) {
  return margins(weights, scopes);
}

SupportCheck support_check(const Model& model, const MarginalSet& marginals,
                           const HypersiteSet& members, bool negative, const Rational& optimum,
                           Arithmetic arithmetic, std::size_t cap) {
  const auto total = assignment_count(model, cap);
  const int L = model.num_labels();
  struct Member {
    std::vector<std::size_t> sites;
    std::vector<bool> support;
  };
  std::vector<Member> tests;
  for (const auto& s : members) {
    if (s.empty()) continue;
    const auto& table = marginals.at(s);
    const auto eps = support_threshold(table, arithmetic);
    Member m;
    for (int site : s.sites()) m.sites.push_back(static_cast<std::size_t>(site - 1));
    for (const auto& v : table) m.support.push_back(negative ? v < -eps : v > eps);
    tests.push_back(std::move(m));
  }

  SupportCheck check;
  auto x = assignment_at(0, model.num_sites(), L);
  for (std::size_t i = 0; i < total; ++i, increment(x, L)) {
    bool passes = true;
    for (const auto& m : tests) {
      std::size_t idx = 0;
      std::size_t stride = 1;
      for (std::size_t s : m.sites) {
        idx += static_cast<std::size_t>(x[s]) * stride;
        stride *= static_cast<std::size_t>(L);
      }
      if (!m.support[idx]) {
        passes = false;
        break;
      }
    }
    if (!passes) continue;
    ++check.passing;
    if (!same(evaluate(model, x), optimum, arithmetic)) {
      if (check.non_optimal++ == 0) check.counterexample = x;
    }
  }
  return check;
}

const char* to_string(Family family) { return kFamilyNames[static_cast<int>(family)]; }

Family parse_family(std::string_view name) {
  for (int k = 0; k < 6; ++k) {
    if (name == kFamilyNames[k]) return static_cast<Family>(k);
  }
  throw std::invalid_argument("unknown family '" + std::string(name) + "'");
}

Model generate(const GeneratorConfig& config, std::uint64_t seed, std::size_t index) {
  if (config.min_sites > config.max_sites || config.max_sites < 2 || config.max_sites > 64) {
    throw PreconditionError("generator needs 2 <= max_sites <= 64 and min_sites <= max_sites");
  }
  if (config.min_labels < 2 || config.min_labels > config.max_labels) {
    throw PreconditionError("generator needs 2 <= min_labels <= max_labels");
  }
  if (config.cost_min > config.cost_max) throw PreconditionError("generator cost range is empty");

  Draw draw(mix(mix(seed) ^ mix(index * 0x100 + static_cast<std::uint64_t>(config.family))));
  const int L = static_cast<int>(draw.uniform(config.min_labels, config.max_labels));
  auto sites_at_least = [&](int floor) {
    return static_cast<int>(draw.uniform(std::max(floor, config.min_sites), config.max_sites));
  };

  std::vector<Hypersite> scopes;
  int n = 0;
  switch (config.family) {
    case Family::Chain:
    case Family::Zero:
      n = sites_at_least(2);
      for (int i = 1; i < n; ++i) scopes.push_back(Hypersite{i, i + 1});
      break;
    case Family::Tree:
      n = sites_at_least(2);
      for (int i = 2; i <= n; ++i) {
        scopes.push_back(Hypersite{static_cast<int>(draw.uniform(1, i - 1)), i});
      }
      break;
    case Family::Cycle:
      n = sites_at_least(3);
      for (int i = 1; i < n; ++i) scopes.push_back(Hypersite{i, i + 1});
      scopes.push_back(Hypersite{1, n});
      break;
    case Family::Grid: {
      const int rows = config.max_sites >= 9 ? 3 : 2;
      const int cols = config.max_sites >= 9 ? 3 : config.max_sites / 2;
      n = rows * cols;
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
          const int s = r * cols + c + 1;
          if (c + 1 < cols) scopes.push_back(Hypersite{s, s + 1});
          if (r + 1 < rows) scopes.push_back(Hypersite{s, s + cols});
        }
      }
      break;
    }
    case Family::Hypergraph: {
      n = sites_at_least(3);
      const long count = n + draw.uniform(0, n / 2);
      std::vector<int> pool(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i + 1;
      std::vector<bool> covered(static_cast<std::size_t>(n) + 1, false);
      for (long f = 0; f < count; ++f) {
        const auto arity = static_cast<std::size_t>(draw.uniform(2, 3));
        for (std::size_t k = 0; k < arity; ++k) {
          const auto j = static_cast<std::size_t>(draw.uniform(static_cast<long>(k), n - 1));
          std::swap(pool[k], pool[j]);
        }
        std::vector<int> members(pool.begin(), pool.begin() + static_cast<long>(arity));
        for (int s : members) covered[static_cast<std::size_t>(s)] = true;
        scopes.push_back(Hypersite::from_unsorted(std::move(members)));
      }
      for (int s = 1; s <= n; ++s) {
        if (covered[static_cast<std::size_t>(s)]) continue;
        int other = static_cast<int>(draw.uniform(1, n - 1));
        if (other >= s) ++other;
        scopes.push_back(Hypersite::from_unsorted({s, other}));
      }
      break;
    }
  }
  if (config.unary && config.family != Family::Zero) {
    for (int i = 1; i <= n; ++i) {
      if (draw.uniform(0, 1) == 1) scopes.push_back(Hypersite{i});
    }
  }

  std::vector<FactorTable> factors;
  for (auto& scope : scopes) {
    std::vector<Rational> values(table_size(L, scope.size()));
    if (config.family != Family::Zero) {
      for (auto& v : values) v = Rational(draw.uniform(config.cost_min, config.cost_max));
    }
    factors.emplace_back(std::move(scope), std::move(values));
  }
  return Model(n, L, std::move(factors));
}

const char* to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Success: return "ok";
    case Outcome::Mismatch: return "mismatch";
    case Outcome::Failure: return "failure";
    case Outcome::Unsupported: return "unsupported";
    case Outcome::Skipped: return "skipped";
  }
  return "unknown";
}

InstanceRecord analyze_instance(const Model& model, const InstanceOrigin& origin,
                                const HarnessOptions& options,
                                std::optional<Certificate>* certificate) {
  InstanceRecord r;
  r.id = origin.id.empty() ? fingerprint(model) : origin.id;
  r.family = origin.config ? to_string(origin.config->family) : "none";
  r.seed = origin.seed;
  r.index = origin.index;
  r.sites = model.num_sites();
  r.labels = model.num_labels();
  r.factors = model.factors().size();
  const auto arith = options.arithmetic;

  std::vector<std::string> kinds;
  std::vector<SolutionSection> solutions;
  try {
    const auto merged = merge_to_frontier(model);
    const auto emin = solve_local(merged, ProblemKind::Min, arith);
    const auto emax = solve_local(merged, ProblemKind::Max, arith);
    const auto delta = solve_local(merged, ProblemKind::Delta, arith);
    solutions = {solution_section("min", emin), solution_section("max", emax),
                 solution_section("delta", delta)};
    r.lp_min = emin.value;
    r.lp_max = emax.value;
    r.lp_delta = delta.value;

    const auto modes = enumerate_modes(model, {options.enumeration_cap, 1});
    r.brute_min = modes.min_value;
    r.brute_max = modes.max_value;
    r.gap_min = r.brute_min - r.lp_min;
    r.gap_max = r.lp_max - r.brute_max;
    r.gap_delta = (r.brute_min - r.brute_max) - r.lp_delta;
    if (arith == Arithmetic::Float) {
      for (auto* gap : {&r.gap_min, &r.gap_max, &r.gap_delta}) {
        if (is_zero(*gap, arith)) *gap = 0;
      }
    }
    if (!r.tight()) {
      kinds.push_back("gap");
      r.notes.push_back("relaxation gap");
    }

    const auto front = merged.scopes();
    r.frontier_size = front.size();
    for (const auto& s : front) r.atomic_members += is_atomic(merged, s) ? 1 : 0;
    const bool assumption = r.atomic_members == r.frontier_size;
    HypersiteSet filtered;
    try {
      filtered = atomic_frontier(merged);
      r.atomic_covers = true;
    } catch (const DecodeUnsupported& e) {
      r.notes.push_back(e.what());
    }

    if (r.tight() && r.atomic_covers) {
      if (!assumption) kinds.push_back("atomicity");

      // Saturation of every frontier delta-marginal.
      const auto tol = arith == Arithmetic::Rational ? DeltaTolerance::exact()
                                                     : DeltaTolerance::floating();
      std::vector<std::string> unsaturated;
      bool all_degenerate = true;
      for (const auto& s : front) {
        if (s.empty() || is_saturated(delta.marginals.at(s), tol)) continue;
        unsaturated.push_back(s.to_string());
        all_degenerate = all_degenerate && isolated_constant(merged, s);
      }
      r.saturation = unsaturated.empty() ? Outcome::Success : Outcome::Mismatch;
      if (!unsaturated.empty()) {
        kinds.push_back("saturation");
        r.notes.push_back("unsaturated " + join(unsaturated, " "));
        if (!assumption) {
          ++r.explained;
          r.notes.push_back("saturation failure explained by a non-atomic frontier member");
        } else {
          // Only a gap or an atomicity violation excuses a failure; the
          // diagnosis is recorded either way.
          ++r.unexplained;
          if (all_degenerate) r.notes.push_back("unsaturated members are isolated constant factors");
        }
      }

      auto support = [&](const MarginalSet& m, bool negative, const Rational& target) {
        return support_check(model, m, filtered, negative, target, arith,
                             options.enumeration_cap);
      };
      const auto support_inf = support(delta.marginals, false, r.brute_min);
      const auto support_sup = support(delta.marginals, true, r.brute_max);
      r.support_inf = support_inf.sound() ? Outcome::Success : Outcome::Mismatch;
      r.support_sup = support_sup.sound() ? Outcome::Success : Outcome::Mismatch;

      struct Run {
        Outcome* outcome;
        const char* name;
        const MarginalSet* marginals;
        Sign sign;
        bool delta;
        const Rational* target;
      };
      const Run runs[] = {
          {&r.decode_inf, "decode_inf", &delta.marginals, Sign::Inf, true, &r.brute_min},
          {&r.decode_sup, "decode_sup", &delta.marginals, Sign::Sup, true, &r.brute_max},
          {&r.decode_min, "decode_min", &emin.marginals, Sign::Inf, false, &r.brute_min},
          {&r.decode_max, "decode_max", &emax.marginals, Sign::Sup, false, &r.brute_max},
      };
      for (const auto& run : runs) {
        DecodeOptions decode_options;
        decode_options.delta = run.delta;
        decode_options.arithmetic = arith;
        std::string detail;
        try {
          const auto x = greedy_decode(*run.marginals, merged, run.sign, decode_options);
          const auto value = evaluate(model, x);
          if (same(value, *run.target, arith)) {
            *run.outcome = Outcome::Success;
            continue;
          }
          *run.outcome = Outcome::Mismatch;
          detail = "value " + to_string(value);
        } catch (const DecodeFailure& failure) {
          *run.outcome = Outcome::Failure;
          detail = failure.what();
        }
        kinds.push_back(run.name);
        const bool negative = run.delta && run.sign == Sign::Sup;
        const auto check = run.delta ? (negative ? support_sup : support_inf)
                                     : support(*run.marginals, false, *run.target);
        r.notes.push_back(std::string(run.name) + " " + to_string(*run.outcome) + ": " + detail);
        if (!assumption) {
          ++r.explained;
          r.notes.push_back(std::string(run.name) + " explained by a non-atomic frontier member");
        } else {
          ++r.unexplained;
          if (!check.sound()) {
            std::string why = check.passing == 0
                                  ? "no assignment has support on every member"
                                  : std::to_string(check.non_optimal) +
                                        " supported assignments are not optimal";
            r.notes.push_back(std::string(run.name) + " support check: " + why);
            kinds.push_back("support");
          } else {
            r.notes.push_back(std::string(run.name) + " support check sound; greedy prefix not extendable");
          }
        }
      }
    }
  } catch (const std::exception& e) {
    r.error = e.what();
    kinds.push_back("error");
  }

  if (!kinds.empty()) {
    std::sort(kinds.begin(), kinds.end());
    kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
    r.certificate = r.id + ".model";
    if (certificate != nullptr) {
      SolutionSection head;
      head.name = "certificate";
      auto meta = [&](const char* key, std::string value) { head.meta.emplace_back(key, std::move(value)); };
      meta("id", r.id);
      meta("kind", join(kinds, ","));
      meta("family", r.family);
      if (origin.config) {
        const auto& c = *origin.config;
        meta("seed", std::to_string(origin.seed));
        meta("index", std::to_string(origin.index));
        meta("min_sites", std::to_string(c.min_sites));
        meta("max_sites", std::to_string(c.max_sites));
        meta("min_labels", std::to_string(c.min_labels));
        meta("max_labels", std::to_string(c.max_labels));
        meta("cost_min", std::to_string(c.cost_min));
        meta("cost_max", std::to_string(c.cost_max));
        meta("unary", c.unary ? "1" : "0");
      }
      meta("arithmetic", to_string(arith));
      if (r.error.empty()) {
        meta("lp_min", to_string(r.lp_min));
        meta("lp_max", to_string(r.lp_max));
        meta("lp_delta", to_string(r.lp_delta));
        meta("brute_min", to_string(r.brute_min));
        meta("brute_max", to_string(r.brute_max));
        meta("atomic", std::to_string(r.atomic_members) + "/" + std::to_string(r.frontier_size));
        meta("saturation", to_string(r.saturation));
        meta("decode", std::string(to_string(r.decode_inf)) + " " + to_string(r.decode_sup) + " " +
                           to_string(r.decode_min) + " " + to_string(r.decode_max));
        meta("support", std::string(to_string(r.support_inf)) + " " + to_string(r.support_sup));
      } else {
        meta("error", r.error);
      }
      for (const auto& note : r.notes) meta("note", note);
      NativeDocument document{model, {std::move(head)}};
      for (auto& s : solutions) document.solutions.push_back(std::move(s));
      *certificate = Certificate{r.certificate, serialize_native(document)};
    }
  }
  return r;
}

TightnessReport tightness_report(const GeneratorConfig& config, std::uint64_t seed,
                                 std::size_t count, const HarnessOptions& options) {
  std::vector<InstanceRecord> records(count);
  std::vector<std::optional<Certificate>> certificates(count);
  const auto workers = std::min<std::size_t>(resolve_workers(options.workers), std::max<std::size_t>(count, 1));
  auto work = [&](std::size_t w) {
    for (std::size_t i = w; i < count; i += workers) {
      InstanceOrigin origin{config, seed, i,
                            std::string(to_string(config.family)) + "-" + std::to_string(seed) +
                                "-" + std::to_string(i)};
      try {
        const auto model = generate(config, seed, i);
        records[i] = analyze_instance(model, origin, options, &certificates[i]);
      } catch (const std::exception& e) {
        records[i].id = origin.id;
        records[i].family = to_string(config.family);
        records[i].seed = seed;
        records[i].index = i;
        records[i].error = e.what();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  TightnessReport report;
  report.records = std::move(records);
  for (auto& c : certificates) {
    if (c) report.certificates.push_back(std::move(*c));
  }
  return report;
}

void append(TightnessReport& into, TightnessReport&& from) {
  for (auto& r : from.records) into.records.push_back(std::move(r));
  for (auto& c : from.certificates) into.certificates.push_back(std::move(c));
}

std::vector<FamilySummary> summarize(const TightnessReport& report) {
  std::vector<FamilySummary> out;
  for (const auto& r : report.records) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const FamilySummary& s) { return s.family == r.family; });
    if (it == out.end()) {
      out.push_back({});
      it = std::prev(out.end());
      it->family = r.family;
    }
    ++it->instances;
    if (!r.error.empty()) {
      ++it->errors;
      continue;
    }
    it->tight_min += r.gap_min == 0 ? 1 : 0;
    it->tight_delta += r.gap_delta == 0 ? 1 : 0;
    if (r.saturation != Outcome::Skipped) {
      ++it->in_scope;
      it->saturation_ok += r.saturation == Outcome::Success ? 1 : 0;
      for (auto o : {r.decode_inf, r.decode_sup, r.decode_min, r.decode_max}) {
        it->decodes_ok += o == Outcome::Success ? 1 : 0;
      }
    }
    it->explained += r.explained;
    it->unexplained += r.unexplained;
  }
  return out;
}

void write_csv(const TightnessReport& report, std::ostream& out) {
  out << "id,family,seed,index,sites,labels,factors,frontier,atomic,atomic_covers,"
         "lp_min,lp_max,lp_delta,brute_min,brute_max,gap_min,gap_max,gap_delta,tight,"
         "saturation,decode_inf,decode_sup,decode_min,decode_max,support_inf,support_sup,"
         "explained,unexplained,certificate,notes,error\n";
  for (const auto& r : report.records) {
    out << csv_field(r.id) << ',' << r.family << ',' << r.seed << ',' << r.index << ','
        << r.sites << ',' << r.labels << ',' << r.factors << ',' << r.frontier_size << ','
        << r.atomic_members << ',' << (r.atomic_covers ? 1 : 0) << ',' << to_string(r.lp_min)
        << ',' << to_string(r.lp_max) << ',' << to_string(r.lp_delta) << ','
        << to_string(r.brute_min) << ',' << to_string(r.brute_max) << ','
        << to_string(r.gap_min) << ',' << to_string(r.gap_max) << ',' << to_string(r.gap_delta)
        << ',' << (r.error.empty() && r.tight() ? 1 : 0) << ',' << to_string(r.saturation) << ','
        << to_string(r.decode_inf) << ',' << to_string(r.decode_sup) << ','
        << to_string(r.decode_min) << ',' << to_string(r.decode_max) << ','
        << to_string(r.support_inf) << ',' << to_string(r.support_sup) << ',' << r.explained
        << ',' << r.unexplained << ',' << csv_field(r.certificate) << ','
        << csv_field(join(r.notes, "; ")) << ',' << csv_field(r.error) << '\n';
  }
}

void write_summary(const TightnessReport& report, std::ostream& out) {
  auto rate = [](std::size_t k, std::size_t n) {
    std::ostringstream s;
    s << k << '/' << n;
    if (n > 0) {
      char buffer[16];
      std::snprintf(buffer, sizeof buffer, " (%.3f)", static_cast<double>(k) / static_cast<double>(n));
      s << buffer;
    }
    return s.str();
  };
  for (const auto& s : summarize(report)) {
    const auto solved = s.instances - s.errors;
    out << s.family << ": " << s.instances << " instances, min tight " << rate(s.tight_min, solved)
        << ", delta tight " << rate(s.tight_delta, solved) << ", checked " << s.in_scope
        << ", saturated " << rate(s.saturation_ok, s.in_scope) << ", decodes "
        << rate(s.decodes_ok, 4 * s.in_scope) << ", explained " << s.explained
        << ", unexplained " << s.unexplained << ", errors " << s.errors << '\n';
  }
  out << "certificates " << report.certificates.size() << '\n';
}

ReplayResult replay_certificate(std::string_view text, const HarnessOptions& options) {
  ReplayResult result;
  try {
    const auto document = parse_native_document(text);
    const auto* head = document.find_solution("certificate");
    if (head == nullptr) return {false, "no certificate section"};
    auto get = [&](const char* key) {
      auto value = head->find_meta(key);
      if (!value) throw PreconditionError(std::string("certificate lacks '") + key + "'");
      return *value;
    };

    InstanceOrigin origin;
    origin.id = get("id");
    HarnessOptions replay = options;
    replay.arithmetic = get("arithmetic") == "float" ? Arithmetic::Float : Arithmetic::Rational;
    if (get("family") != "none") {
      GeneratorConfig config;
      config.family = parse_family(get("family"));
      config.min_sites = std::stoi(get("min_sites"));
      config.max_sites = std::stoi(get("max_sites"));
      config.min_labels = std::stoi(get("min_labels"));
      config.max_labels = std::stoi(get("max_labels"));
      config.cost_min = std::stol(get("cost_min"));
      config.cost_max = std::stol(get("cost_max"));
      config.unary = get("unary") == "1";
      origin.config = config;
      origin.seed = std::stoull(get("seed"));
      origin.index = std::stoull(get("index"));
      if (!(generate(config, origin.seed, origin.index) == document.model)) {
        return {false, "regenerated model differs from the embedded one"};
      }
    }
    std::optional<Certificate> fresh;
    analyze_instance(document.model, origin, replay, &fresh);
    if (!fresh) return {false, "instance no longer produces a certificate"};
    if (fresh->text != text) {
      std::istringstream a(fresh->text);
      std::istringstream b{std::string(text)};
      std::string la;
      std::string lb;
      std::size_t line = 0;
      while (true) {
        ++line;
        const bool more_a = static_cast<bool>(std::getline(a, la));
        const bool more_b = static_cast<bool>(std::getline(b, lb));
        if (!more_a || !more_b || la != lb) break;
      }
      return {false, "replay differs at line " + std::to_string(line) + ": '" + la + "' vs '" + lb + "'"};
    }
    return {true, "reproduced " + get("kind")};
  } catch (const std::exception& e) {
    return {false, e.what()};
  }
}

}  // namespace deltamap
