#include "flexsat/formula/cnf.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace flexsat {

ParseError::ParseError(std::size_t line, const std::string& what)
    : FormulaError("line " + std::to_string(line) + ": " + what), line_(line) {}

std::optional<Clause> Clause::make(std::vector<Lit> lits, int lbd) {
  if (lits.empty()) throw FormulaError("empty clause");
  if (std::find(lits.begin(), lits.end(), 0) != lits.end()) throw FormulaError("zero literal in clause");
  std::sort(lits.begin(), lits.end(), lit_less);
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  for (std::size_t i = 1; i < lits.size(); ++i)
    if (lits[i] == -lits[i - 1]) return std::nullopt;
  return Clause(std::move(lits), lbd);
}

Clause Clause::from_canonical(std::vector<Lit> lits, int lbd) {
  if (lits.empty()) throw FormulaError("empty clause");
  if (!is_canonical(lits)) throw FormulaError("clause is not canonical");
  return Clause(std::move(lits), lbd);
}

bool is_canonical(std::span<const Lit> lits) {
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (lits[i] == 0) return false;
    // strictly increasing variables excludes duplicates and tautologies
    if (i > 0 && var_of(lits[i - 1]) >= var_of(lits[i])) return false;
  }
  return true;
}

bool clause_less(std::span<const Lit> a, std::span<const Lit> b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), lit_less);
}

void Cnf::add(Clause c) {
  for (Lit l : c)
    if (var_of(l) > num_vars_) throw FormulaError("literal out of range: " + std::to_string(l));
  serialized_size_ += c.size() + 1;
  clauses_.push_back(std::move(c));
}

void Assignment::set(int var, bool value) {
  if (var < 1 || var > num_vars()) throw FormulaError("variable out of range: " + std::to_string(var));
  values_[static_cast<std::size_t>(var)] = value ? 1 : 0;
}

std::optional<bool> Assignment::get(int var) const {
  if (var < 1 || var > num_vars()) return std::nullopt;
  const auto v = values_[static_cast<std::size_t>(var)];
  if (v < 0) return std::nullopt;
  return v == 1;
}

bool Assignment::satisfies(Lit lit) const {
  const auto value = get(var_of(lit));
  if (!value) throw FormulaError("unassigned variable " + std::to_string(var_of(lit)));
  return *value == (lit > 0);
}

namespace {

bool parse_int(std::string_view tok, long long& out) {
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) toks.push_back(line.substr(start, i - start));
  }
  return toks;
}

}  // namespace

Cnf parse_dimacs(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool saw_anything = false;
  std::optional<Cnf> cnf;
  std::vector<Lit> pending;
  std::size_t pending_line = 0;

  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    saw_anything = true;
    if (toks[0][0] == 'c') continue;
    if (toks[0] == "p") {
      if (cnf) throw ParseError(lineno, "duplicate header");
      long long vars = 0, clauses = 0;
      if (toks.size() != 4 || toks[1] != "cnf" || !parse_int(toks[2], vars) || !parse_int(toks[3], clauses) ||
          vars < 0 || clauses < 0 || vars > (1LL << 30))
        throw ParseError(lineno, "malformed header");
      cnf.emplace(static_cast<int>(vars));
      continue;
    }
    // Some generators end the file with a '%' line.
    if (toks[0] == "%") break;
    if (!cnf) throw ParseError(lineno, "clause before header");
    for (auto tok : toks) {
      long long value = 0;
      if (!parse_int(tok, value)) throw ParseError(lineno, "invalid token '" + std::string(tok) + "'");
      if (value == 0) {
        if (pending.empty()) throw ParseError(lineno, "empty clause");
        if (auto c = Clause::make(std::move(pending))) cnf->add(std::move(*c));
        pending.clear();
        continue;
      }
      if (value > cnf->num_vars() || -value > cnf->num_vars())
        throw ParseError(lineno, "literal out of range: " + std::string(tok));
      if (pending.empty()) pending_line = lineno;
      pending.push_back(static_cast<Lit>(value));
    }
  }
  if (!saw_anything) throw ParseError(lineno, "empty input");
  if (!cnf) throw ParseError(lineno, "missing header");
  if (!pending.empty()) throw ParseError(pending_line, "missing zero terminator");
  return std::move(*cnf);
}

Cnf parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in);
}

Cnf read_dimacs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormulaError("cannot open " + path);
  return parse_dimacs(in);
}

void write_dimacs(std::ostream& out, const Cnf& cnf) {
  out << "p cnf " << cnf.num_vars() << ' ' << cnf.num_clauses() << '\n';
  for (const auto& c : cnf.clauses()) {
    for (Lit l : c) out << l << ' ';
    out << "0\n";
  }
}

std::string to_dimacs(const Cnf& cnf) {
  std::ostringstream out;
  write_dimacs(out, cnf);
  return out.str();
}

bool check_model(const Cnf& cnf, const Assignment& assignment) {
  bool all = true;
  for (const auto& c : cnf.clauses()) {
    bool sat = false;
    // every literal is inspected so that an unassigned variable is always reported
    for (Lit l : c) sat = assignment.satisfies(l) || sat;
    all = all && sat;
  }
  return all;
}

}  // namespace flexsat
