#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "relic/sat.hpp"

namespace relic::sat {

DimacsCnf read_dimacs(std::istream& in) {
  DimacsCnf cnf;
  bool have_header = false;
  std::size_t declared_clauses = 0;
  std::vector<Lit> current;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == 'c' || line[0] == '%') continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p, fmt;
      long long v = -1, c = -1;
      if (have_header || !(ls >> p >> fmt >> v >> c) || fmt != "cnf" || v < 0 || c < 0)
        throw StructuralError("dimacs line " + std::to_string(line_no) + ": bad header");
      cnf.num_vars = static_cast<std::uint32_t>(v);
      declared_clauses = static_cast<std::size_t>(c);
      have_header = true;
      continue;
    }
    if (!have_header)
      throw StructuralError("dimacs line " + std::to_string(line_no) + ": clause before header");
    long long x = 0;
    while (ls >> x) {
      if (x == 0) {
        cnf.clauses.push_back(current);
        current.clear();
        continue;
      }
      const Lit l = Lit::from_dimacs(x);
      if (l.var().index > cnf.num_vars)
        throw StructuralError("dimacs line " + std::to_string(line_no) + ": variable " +
                              std::to_string(l.var().index) + " exceeds header");
      current.push_back(l);
    }
    if (!ls.eof())
      throw StructuralError("dimacs line " + std::to_string(line_no) + ": malformed literal");
  }
  if (!have_header) throw StructuralError("dimacs: missing header");
  if (!current.empty()) throw StructuralError("dimacs: unterminated final clause");
  if (cnf.clauses.size() != declared_clauses)
    throw StructuralError("dimacs: header declares " + std::to_string(declared_clauses) +
                          " clauses, found " + std::to_string(cnf.clauses.size()));
  return cnf;
}

void write_dimacs(std::ostream& out, const DimacsCnf& cnf) {
  out << "p cnf " << cnf.num_vars << ' ' << cnf.clauses.size() << '\n';
  for (const auto& c : cnf.clauses) {
    for (Lit l : c) out << l.to_dimacs() << ' ';
    out << "0\n";
  }
}

}  // namespace relic::sat
