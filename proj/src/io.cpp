#include "deltamap/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "deltamap/errors.hpp"

namespace deltamap {

namespace {

struct Token {
  std::string_view text;
  std::size_t line;
  std::size_t column;
  bool line_start;
};

// Whitespace-separated tokens with 1-based positions; '#' comments run to the
// end of the line when `comments` is set.
std::vector<Token> tokenize(std::string_view text, bool comments) {
  std::vector<Token> tokens;
  std::size_t line = 1;
  std::size_t column = 1;
  bool line_start = true;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      column = 1;
      line_start = true;
      ++i;
    } else if (c == ' ' || c == '\t' || c == '\r') {
      ++column;
      ++i;
    } else if (comments && c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else {
      const std::size_t start = i;
      while (i < text.size() && text[i] != '\n' && text[i] != ' ' && text[i] != '\t' &&
             text[i] != '\r' && !(comments && text[i] == '#')) {
        ++i;
      }
      tokens.push_back({text.substr(start, i - start), line, column, line_start});
      column += i - start;
      line_start = false;
    }
  }
  return tokens;
}

class Cursor {
 public:
  explicit Cursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }
  const Token& peek() const {
    if (done()) fail_at_end("unexpected end of input");
    return tokens_[pos_];
  }

  const Token& next(const char* what) {
    if (done()) fail_at_end(std::string("unexpected end of input, expected ") + what);
    return tokens_[pos_++];
  }

  [[noreturn]] void fail(const Token& at, const std::string& message) const {
    throw ParseError(at.line, at.column, message);
  }
  [[noreturn]] void fail_at_end(const std::string& message) const {
    if (tokens_.empty()) throw ParseError(1, 1, message);
    const auto& last = tokens_.back();
    throw ParseError(last.line, last.column + last.text.size(), message);
  }

  long long integer(const char* what) {
    const auto& tok = next(what);
    long long value = 0;
    if (tok.text.empty() || tok.text.size() > 12) fail(tok, std::string("expected ") + what);
    for (char c : tok.text) {
      if (c < '0' || c > '9') fail(tok, std::string("expected ") + what + ", got '" +
                                          std::string(tok.text) + "'");
      value = value * 10 + (c - '0');
    }
    return value;
  }

  Rational number(const char* what) {
    const auto& tok = next(what);
    try {
      return parse_rational(tok.text);
    } catch (const std::invalid_argument&) {
      fail(tok, std::string("expected ") + what + ", got '" + std::string(tok.text) + "'");
    }
  }

  // Remaining tokens on the current line, joined by single spaces.
  std::string rest_of_line() {
    std::string out;
    while (!done() && !peek().line_start) {
      if (!out.empty()) out += ' ';
      out += peek().text;
      ++pos_;
    }
    return out;
  }

  std::vector<const Token*> line_tokens() {
    std::vector<const Token*> out;
    while (!done() && !peek().line_start) out.push_back(&tokens_[pos_++]);
    return out;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

Hypersite parse_scope(Cursor& cur, int sites) {
  std::vector<int> members;
  for (const Token* tok : cur.line_tokens()) {
    int site = 0;
    for (char c : tok->text) {
      if (c < '0' || c > '9' || site > 100000000) cur.fail(*tok, "expected a site index");
      site = site * 10 + (c - '0');
    }
    if (site < 1 || site > sites) {
      cur.fail(*tok, "site " + std::string(tok->text) + " is outside 1.." + std::to_string(sites));
    }
    if (!members.empty() && site <= members.back()) {
      cur.fail(*tok, "sites must be strictly increasing");
    }
    members.push_back(site);
  }
  return Hypersite(std::move(members));
}

std::vector<Rational> parse_values(Cursor& cur, std::size_t count, const std::string& owner) {
  std::vector<Rational> values;
  values.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    if (cur.done()) {
      cur.fail_at_end(owner + ": expected " + std::to_string(count) + " values, found " +
                      std::to_string(k));
    }
    values.push_back(cur.number("a table value"));
  }
  return values;
}

void expect_keyword(Cursor& cur, std::string_view keyword) {
  const auto& tok = cur.next(std::string(keyword).c_str());
  if (tok.text != keyword || !tok.line_start) {
    cur.fail(tok, "expected '" + std::string(keyword) + "', got '" + std::string(tok.text) + "'");
  }
}

SolutionSection parse_solution(Cursor& cur, int sites, int labels) {
  SolutionSection section;
  section.name = cur.rest_of_line();
  while (true) {
    const auto& tok = cur.next("'end' of the solution section");
    if (!tok.line_start) cur.fail(tok, "unexpected '" + std::string(tok.text) + "'");
    if (tok.text == "end") break;
    if (tok.text == "meta") {
      const auto& key = cur.next("a metadata key");
      if (key.line_start) cur.fail(key, "metadata key missing");
      section.meta.emplace_back(std::string(key.text), cur.rest_of_line());
    } else if (tok.text == "value") {
      if (section.value) cur.fail(tok, "duplicate value line");
      section.value = cur.number("a solution value");
    } else if (tok.text == "assignment") {
      if (section.assignment) cur.fail(tok, "duplicate assignment line");
      Assignment x;
      for (const Token* label : cur.line_tokens()) {
        int v = 0;
        for (char c : label->text) {
          if (c < '0' || c > '9' || v > 1000000) cur.fail(*label, "expected a label index");
          v = v * 10 + (c - '0');
        }
        if (v >= labels) {
          cur.fail(*label, "label " + std::string(label->text) + " is outside 0.." +
                               std::to_string(labels - 1));
        }
        x.push_back(v);
      }
      if (x.size() != static_cast<std::size_t>(sites)) {
        cur.fail(tok, "assignment has " + std::to_string(x.size()) + " labels, expected " +
                          std::to_string(sites));
      }
      section.assignment = std::move(x);
    } else if (tok.text == "marginal") {
      auto scope = parse_scope(cur, sites);
      if (section.marginals.count(scope)) cur.fail(tok, "duplicate marginal " + scope.to_string());
      auto values = parse_values(cur, table_size(labels, scope.size()), "marginal " + scope.to_string());
      section.marginals.emplace(std::move(scope), std::move(values));
    } else {
      cur.fail(tok, "unknown solution entry '" + std::string(tok.text) + "'");
    }
  }
  return section;
}

void write_values(std::ostringstream& out, std::span<const Rational> values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out << ' ';
    out << to_string(values[k]);
  }
  out << '\n';
}

void write_scope_line(std::ostringstream& out, const char* keyword, const Hypersite& scope) {
  out << keyword;
  for (int site : scope.sites()) out << ' ' << site;
  out << '\n';
}

}  // namespace

std::optional<std::string> SolutionSection::find_meta(std::string_view key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  return std::nullopt;
}

const SolutionSection* NativeDocument::find_solution(std::string_view name) const {
  for (const auto& s : solutions) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

NativeDocument parse_native_document(std::string_view text) {
  Cursor cur(tokenize(text, true));
  expect_keyword(cur, "deltamap-model");
  {
    const auto& version = cur.next("a format version");
    if (version.text != "1") cur.fail(version, "unsupported format version '" + std::string(version.text) + "'");
  }
  expect_keyword(cur, "sites");
  const auto sites_tok = cur.peek();
  const auto sites = cur.integer("a site count");
  if (sites > 1000000) cur.fail(sites_tok, "site count is too large");
  expect_keyword(cur, "labels");
  const auto labels_tok = cur.peek();
  const auto labels = cur.integer("a label count");
  if (labels < 2 || labels > 1000000) cur.fail(labels_tok, "label count must be between 2 and 1000000");

  std::vector<FactorTable> factors;
  while (true) {
    const auto& tok = cur.next("'factor' or 'end'");
    if (!tok.line_start) cur.fail(tok, "unexpected '" + std::string(tok.text) + "'");
    if (tok.text == "end") break;
    if (tok.text != "factor") cur.fail(tok, "expected 'factor' or 'end', got '" + std::string(tok.text) + "'");
    auto scope = parse_scope(cur, static_cast<int>(sites));
    std::size_t size = 0;
    try {
      size = table_size(static_cast<int>(labels), scope.size());
    } catch (const SizeError& e) {
      cur.fail(tok, e.what());
    }
    auto values = parse_values(cur, size, "factor " + scope.to_string());
    factors.emplace_back(std::move(scope), std::move(values));
  }

  NativeDocument document{Model(static_cast<int>(sites), static_cast<int>(labels), std::move(factors)), {}};
  while (!cur.done()) {
    const auto& tok = cur.next("'solution'");
    if (tok.text != "solution" || !tok.line_start) {
      cur.fail(tok, "expected 'solution', got '" + std::string(tok.text) + "'");
    }
    document.solutions.push_back(
        parse_solution(cur, static_cast<int>(sites), static_cast<int>(labels)));
  }
  return document;
}

Model parse_native(std::string_view text) { return parse_native_document(text).model; }

std::string serialize_native(const Model& model) { return serialize_native(NativeDocument{model, {}}); }

std::string serialize_native(const NativeDocument& document) {
  const auto& model = document.model;
  std::ostringstream out;
  out << "deltamap-model 1\n"
      << "sites " << model.num_sites() << '\n'
      << "labels " << model.num_labels() << '\n';
  for (const auto& f : model.factors()) {
    write_scope_line(out, "factor", f.scope());
    write_values(out, f.values());
  }
  out << "end\n";
  for (const auto& section : document.solutions) {
    out << "solution";
    if (!section.name.empty()) out << ' ' << section.name;
    out << '\n';
    for (const auto& [key, value] : section.meta) {
      out << "meta " << key;
      if (!value.empty()) out << ' ' << value;
      out << '\n';
    }
    if (section.value) out << "value " << to_string(*section.value) << '\n';
    if (section.assignment) {
      out << "assignment";
      for (int label : *section.assignment) out << ' ' << label;
      out << '\n';
    }
    for (const auto& [scope, values] : section.marginals) {
      write_scope_line(out, "marginal", scope);
      write_values(out, values);
    }
    out << "end\n";
  }
  return out.str();
}

Model parse_uai(std::string_view text, const UaiOptions& options) {
  Cursor cur(tokenize(text, false));
  {
    const auto& magic = cur.next("'MARKOV'");
    if (magic.text != "MARKOV") {
      cur.fail(magic, "expected preamble 'MARKOV', got '" + std::string(magic.text) + "'");
    }
  }
  const auto n = cur.integer("a variable count");
  if (n > 100000) cur.fail_at_end("variable count is too large");
  long long labels = 0;
  for (long long v = 0; v < n; ++v) {
    const auto& at = cur.peek();
    const auto card = cur.integer("a cardinality");
    if (card < 2 || card > 1000000) cur.fail(at, "cardinality must be between 2 and 1000000");
    if (v == 0) {
      labels = card;
    } else if (card != labels) {
      cur.fail(at, "mixed cardinalities (" + std::to_string(labels) + " and " +
                       std::to_string(card) + ") are not supported");
    }
  }
  if (n == 0) labels = 2;

  const auto count = cur.integer("a factor count");
  if (count > 1000000) cur.fail_at_end("factor count is too large");
  std::vector<std::vector<int>> scopes;
  for (long long f = 0; f < count; ++f) {
    const auto arity = cur.integer("a factor arity");
    if (arity > n) cur.fail_at_end("factor " + std::to_string(f) + " has arity above the variable count");
    std::vector<int> scope;
    for (long long k = 0; k < arity; ++k) {
      const auto& at = cur.peek();
      const auto v = cur.integer("a variable index");
      if (v >= n) cur.fail(at, "variable " + std::to_string(v) + " is out of range in factor " + std::to_string(f));
      if (std::find(scope.begin(), scope.end(), static_cast<int>(v)) != scope.end()) {
        cur.fail(at, "variable " + std::to_string(v) + " repeats in factor " + std::to_string(f));
      }
      scope.push_back(static_cast<int>(v));
    }
    scopes.push_back(std::move(scope));
  }

  const int L = static_cast<int>(labels);
  std::vector<FactorTable> factors;
  for (std::size_t f = 0; f < scopes.size(); ++f) {
    const auto& file_scope = scopes[f];
    const auto size = table_size(L, file_scope.size());
    const auto owner = "factor " + std::to_string(f);
    if (cur.done()) cur.fail_at_end(owner + ": missing table");
    const auto& at = cur.peek();
    const auto entries = cur.integer("a table entry count");
    if (static_cast<std::size_t>(entries) != size) {
      cur.fail(at, owner + ": table has " + std::to_string(entries) + " entries, expected " +
                       std::to_string(size));
    }
    std::vector<int> sorted_sites;
    for (int v : file_scope) sorted_sites.push_back(v + 1);
    const auto scope = Hypersite::from_unsorted(sorted_sites);
    std::vector<std::size_t> stride(file_scope.size());
    for (std::size_t k = 0; k < file_scope.size(); ++k) {
      std::size_t s = 1;
      for (std::size_t j = 0; j < scope.position(file_scope[k] + 1); ++j) s *= static_cast<std::size_t>(L);
      stride[k] = s;
    }
    std::vector<Rational> values(size);
    for (std::size_t e = 0; e < size; ++e) {
      if (cur.done()) {
        cur.fail_at_end(owner + ": table truncated after " + std::to_string(e) + " of " +
                        std::to_string(size) + " entries");
      }
      const auto& tok = cur.peek();
      Rational value = cur.number("a table entry");
      if (options.neg_log) {
        const double p = value.get_d();
        if (!(p > 0) || !std::isfinite(p)) {
          cur.fail(tok, owner + ": probability " + std::string(tok.text) +
                            " has no finite -log cost");
        }
        value = from_double(-std::log(p));
      }
      // Row-major with the last listed variable fastest.
      std::size_t rest = e;
      std::size_t index = 0;
      for (std::size_t k = file_scope.size(); k-- > 0;) {
        index += (rest % static_cast<std::size_t>(L)) * stride[k];
        rest /= static_cast<std::size_t>(L);
      }
      values[index] = std::move(value);
    }
    factors.emplace_back(scope, std::move(values));
  }
  if (!cur.done()) cur.fail(cur.peek(), "trailing content after the last table");
  return Model(static_cast<int>(n), L, std::move(factors));
}

std::string serialize_uai(const Model& model) {
  const int L = model.num_labels();
  std::ostringstream out;
  out << "MARKOV\n" << model.num_sites() << '\n';
  for (int i = 0; i < model.num_sites(); ++i) out << (i ? " " : "") << L;
  out << '\n' << model.factors().size() << '\n';
  for (const auto& f : model.factors()) {
    out << f.scope().size();
    for (int site : f.scope().sites()) out << ' ' << site - 1;
    out << '\n';
  }
  for (const auto& f : model.factors()) {
    const auto arity = f.scope().size();
    out << '\n' << f.values().size() << '\n';
    for (std::size_t e = 0; e < f.values().size(); ++e) {
      // e enumerates configurations with the last site fastest.
      std::size_t rest = e;
      std::size_t index = 0;
      std::size_t stride = 1;
      std::vector<std::size_t> digits(arity);
      for (std::size_t k = arity; k-- > 0;) {
        digits[k] = rest % static_cast<std::size_t>(L);
        rest /= static_cast<std::size_t>(L);
      }
      for (std::size_t k = 0; k < arity; ++k) {
        index += digits[k] * stride;
        stride *= static_cast<std::size_t>(L);
      }
      out << (e ? " " : "") << to_decimal(f[index]);
    }
    out << '\n';
  }
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace deltamap
