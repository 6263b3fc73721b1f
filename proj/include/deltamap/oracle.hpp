#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "deltamap/lp.hpp"
#include "deltamap/model.hpp"
#include "deltamap/orthomarginal.hpp"

namespace deltamap {

inline constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 24;

struct ModesResult {
  Rational min_value;
  Rational max_value;
  /// Complete argument sets in lexicographic order.
  std::vector<Assignment> argmin;
  std::vector<Assignment> argmax;

  bool operator==(const ModesResult&) const = default;
};

struct EnumerationOptions {
  std::size_t cap = kDefaultEnumerationCap;
  /// Worker threads; 0 means one per hardware thread.
  unsigned workers = 1;
};

/// Modes over assignments with little-endian index in [begin, end).
ModesResult enumerate_range(const Model& model, std::size_t begin, std::size_t end);
/// Combines the results of two disjoint ranges.
ModesResult merge_modes(const ModesResult& a, const ModesResult& b);
/// Exhaustive modes. Throws SizeError when L^n exceeds the cap.
ModesResult enumerate_modes(const Model& model, const EnumerationOptions& options = {});

/// True margins of a dense function over each member of `scopes`.
MarginalSet exact_marginals(const DenseFunction& weights, const HypersiteSet& scopes);

/// Assignments whose restriction to every member has support in `marginals`
/// (value above the threshold, or below its negative when `negative`).
struct SupportCheck {
  std::size_t passing = 0;
  std::size_t non_optimal = 0;
  std::optional<Assignment> counterexample;

  /// Some assignment passes and every passing assignment attains the optimum.
  bool sound() const noexcept { return passing > 0 && non_optimal == 0; }
};

SupportCheck support_check(const Model& model, const MarginalSet& marginals,
                           const HypersiteSet& members, bool negative, const Rational& optimum,
                           Arithmetic arithmetic = Arithmetic::Rational,
                           std::size_t cap = kDefaultEnumerationCap);

enum class Family { Chain, Tree, Cycle, Grid, Hypergraph, Zero };
const char* to_string(Family family);
/// Throws std::invalid_argument for an unknown name.
Family parse_family(std::string_view name);

struct GeneratorConfig {
  Family family = Family::Chain;
  int min_sites = 3;
  int max_sites = 8;
  int min_labels = 2;
  int max_labels = 3;
  long cost_min = 0;
  long cost_max = 9;
  /// Add a unary factor on each site with probability 1/2.
  bool unary = true;
};

/// Deterministic in (config, seed, index). Grids are 3x3 when max_sites
/// allows it, 2 x (max_sites / 2) otherwise; hypergraph factors have 2 or 3
/// sites and every site is covered.
Model generate(const GeneratorConfig& config, std::uint64_t seed, std::size_t index);

enum class Outcome { Success, Mismatch, Failure, Unsupported, Skipped };
const char* to_string(Outcome outcome);

struct InstanceRecord {
  std::string id;
  std::string family;
  std::uint64_t seed = 0;
  std::size_t index = 0;
  int sites = 0;
  int labels = 0;
  std::size_t factors = 0;

  Rational lp_min;
  Rational lp_max;
  Rational lp_delta;
  Rational brute_min;
  Rational brute_max;
  /// brute_min - lp_min, lp_max - brute_max, (brute_min - brute_max) - lp_delta.
  Rational gap_min;
  Rational gap_max;
  Rational gap_delta;

  std::size_t frontier_size = 0;
  std::size_t atomic_members = 0;
  /// The atomicity filter kept every covered site.
  bool atomic_covers = false;

  /// Outcomes below are Skipped unless every gap is zero and atomic_covers.
  Outcome saturation = Outcome::Skipped;
  Outcome decode_inf = Outcome::Skipped;  // delta marginals, q > 0
  Outcome decode_sup = Outcome::Skipped;  // delta marginals, q < 0
  Outcome decode_min = Outcome::Skipped;  // min marginals, p > 0
  Outcome decode_max = Outcome::Skipped;  // max marginals, p > 0
  Outcome support_inf = Outcome::Skipped;
  Outcome support_sup = Outcome::Skipped;

  /// Failures with a recorded cause, and failures without one.
  std::size_t explained = 0;
  std::size_t unexplained = 0;
  std::vector<std::string> notes;
  std::string error;
  /// Name of the certificate emitted for this instance, if any.
  std::string certificate;

  bool tight() const { return gap_min == 0 && gap_max == 0 && gap_delta == 0; }
};

struct Certificate {
  std::string name;
  /// Native model document with a "certificate" section and the LP solutions.
  std::string text;
};

struct TightnessReport {
  std::vector<InstanceRecord> records;
  std::vector<Certificate> certificates;
};

struct HarnessOptions {
  Arithmetic arithmetic = Arithmetic::Rational;
  /// Instances analysed concurrently; 0 means one per hardware thread.
  unsigned workers = 1;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
};

/// Where a model came from, so its certificate can be regenerated.
struct InstanceOrigin {
  std::optional<GeneratorConfig> config;
  std::uint64_t seed = 0;
  std::size_t index = 0;
  std::string id;
};

/// Solves the three local LPs, enumerates the modes, and runs the saturation,
/// decode and support checks. Errors are reported inside the record.
InstanceRecord analyze_instance(const Model& model, const InstanceOrigin& origin,
                                const HarnessOptions& options = {},
                                std::optional<Certificate>* certificate = nullptr);

TightnessReport tightness_report(const GeneratorConfig& config, std::uint64_t seed,
                                 std::size_t count, const HarnessOptions& options = {});
void append(TightnessReport& into, TightnessReport&& from);

struct FamilySummary {
  std::string family;
  std::size_t instances = 0;
  std::size_t tight_min = 0;
  std::size_t tight_delta = 0;
  std::size_t in_scope = 0;
  std::size_t saturation_ok = 0;
  std::size_t decodes_ok = 0;
  std::size_t explained = 0;
  std::size_t unexplained = 0;
  std::size_t errors = 0;
};

/// One entry per family, in order of first appearance.
std::vector<FamilySummary> summarize(const TightnessReport& report);

/// Fixed header row, one row per instance.
void write_csv(const TightnessReport& report, std::ostream& out);
void write_summary(const TightnessReport& report, std::ostream& out);

struct ReplayResult {
  bool ok = false;
  std::string message;
};

/// Regenerates the instance (or uses the embedded model when it was not
/// generated), re-solves it, and checks that the recorded values and
/// findings reproduce exactly.
ReplayResult replay_certificate(std::string_view text, const HarnessOptions& options = {});

}  // namespace deltamap
