#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flexsat {

using Lit = std::int32_t;

inline constexpr Lit var_of(Lit lit) { return lit < 0 ? -lit : lit; }

// Canonical literal order: by variable, negative before positive.
inline constexpr bool lit_less(Lit a, Lit b) {
  const Lit va = var_of(a), vb = var_of(b);
  return va != vb ? va < vb : a < b;
}

class FormulaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public FormulaError {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A nonempty, duplicate-free, non-tautological clause whose literals are
/// kept in canonical order, so that structural equality is clause equality.
class Clause {
 public:
  /// Canonicalizes `lits`. Returns nullopt for tautologies; throws
  /// FormulaError on an empty clause or a zero literal.
  static std::optional<Clause> make(std::vector<Lit> lits, int lbd = 0);

  /// Wraps literals that are already canonical (checked).
  static Clause from_canonical(std::vector<Lit> lits, int lbd = 0);

  std::span<const Lit> lits() const { return lits_; }
  std::size_t size() const { return lits_.size(); }
  Lit operator[](std::size_t i) const { return lits_[i]; }
  auto begin() const { return lits_.begin(); }
  auto end() const { return lits_.end(); }

  // 0 = unknown
  int lbd() const { return lbd_; }
  void set_lbd(int lbd) { lbd_ = lbd; }

  // Equality ignores the glue value.
  friend bool operator==(const Clause& a, const Clause& b) { return a.lits_ == b.lits_; }

 private:
  Clause(std::vector<Lit> lits, int lbd) : lits_(std::move(lits)), lbd_(lbd) {}

  std::vector<Lit> lits_;
  int lbd_ = 0;
};

bool is_canonical(std::span<const Lit> lits);

// Sharing order: shorter clauses first, then lexicographic in canonical literal order.
bool clause_less(std::span<const Lit> a, std::span<const Lit> b);
inline bool clause_less(const Clause& a, const Clause& b) { return clause_less(a.lits(), b.lits()); }

class Cnf {
 public:
  Cnf() = default;
  explicit Cnf(int num_vars) : num_vars_(num_vars) {}

  int num_vars() const { return num_vars_; }
  const std::vector<Clause>& clauses() const { return clauses_; }
  std::size_t num_clauses() const { return clauses_.size(); }

  void add(Clause c);

  /// Number of integers in the flat serialization: every literal plus one
  /// terminating zero per clause.
  std::size_t serialized_size() const { return serialized_size_; }

  friend bool operator==(const Cnf& a, const Cnf& b) {
    return a.num_vars_ == b.num_vars_ && a.clauses_ == b.clauses_;
  }

 private:
  int num_vars_ = 0;
  std::vector<Clause> clauses_;
  std::size_t serialized_size_ = 0;
};

/// Partial truth assignment over variables 1..num_vars.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(int num_vars) : values_(static_cast<std::size_t>(num_vars) + 1, -1) {}

  int num_vars() const { return values_.empty() ? 0 : static_cast<int>(values_.size()) - 1; }
  void set(int var, bool value);
  std::optional<bool> get(int var) const;
  bool satisfies(Lit lit) const;  // throws on unassigned

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<std::int8_t> values_;
};

/// Parses DIMACS CNF. Clauses are canonicalized, tautologies dropped; a
/// mismatching clause count in the header is tolerated.
Cnf parse_dimacs(std::istream& in);
Cnf parse_dimacs(std::string_view text);
Cnf read_dimacs_file(const std::string& path);

void write_dimacs(std::ostream& out, const Cnf& cnf);
std::string to_dimacs(const Cnf& cnf);

/// True iff every clause has a satisfied literal. Throws FormulaError if a
/// variable occurring in the formula is unassigned.
bool check_model(const Cnf& cnf, const Assignment& assignment);

}  // namespace flexsat
