#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deltamap/model.hpp"

namespace deltamap {

/// Named result attached to a model: free-form metadata, an optional value
/// and assignment, and per-hypersite tables.
struct SolutionSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> meta;
  std::optional<Rational> value;
  std::optional<Assignment> assignment;
  std::map<Hypersite, std::vector<Rational>> marginals;

  /// First value stored under `key`, if any.
  std::optional<std::string> find_meta(std::string_view key) const;
  bool operator==(const SolutionSection&) const = default;
};

struct NativeDocument {
  Model model;
  std::vector<SolutionSection> solutions;

  const SolutionSection* find_solution(std::string_view name) const;
  bool operator==(const NativeDocument&) const = default;
};

/// Native text format:
///
///   deltamap-model 1
///   sites 3
///   labels 2
///   factor 1 2
///   0 1 1 0
///   end
///   solution delta
///   meta family cycle
///   value -2
///   assignment 0 1 0
///   marginal 1 2
///   0 -1/2 -1/2 1
///   end
///
/// Tables are little-endian (first site of the scope varies fastest). Values
/// are integers, decimals or p/q and are read exactly. '#' starts a comment.
/// Throws ParseError with the position of the offending token.
NativeDocument parse_native_document(std::string_view text);
Model parse_native(std::string_view text);

/// Canonical form: scopes in lexicographic order, one table per line, values
/// in lowest terms.
std::string serialize_native(const Model& model);
std::string serialize_native(const NativeDocument& document);

struct UaiOptions {
  /// Read tables as probabilities and store -log(value) as the cost.
  bool neg_log = false;
};

/// UAI MARKOV text. Variables are zero-based in the file and become sites
/// 1..n; scopes are sorted and tables re-indexed from the file's
/// last-variable-fastest order. All cardinalities must be equal.
Model parse_uai(std::string_view text, const UaiOptions& options = {});

/// UAI MARKOV text for `model`. Values that are not finite decimals are
/// written with 17 significant digits.
std::string serialize_uai(const Model& model);

/// Reads a whole file; throws Error when it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace deltamap
