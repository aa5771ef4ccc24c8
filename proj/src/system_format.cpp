#include "relic/system_format.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

namespace relic {

namespace {

using aiger::AndGate;

struct Token {
  enum Kind { Name, Const, Op } kind;
  std::string text;
};

std::vector<Token> tokenize(std::string_view line, std::size_t lineno) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_' ||
                                 line[j] == '.' || line[j] == '[' || line[j] == ']'))
        ++j;
      out.push_back({Token::Name, std::string(line.substr(i, j - i))});
      i = j;
    } else if (c == '0' || c == '1') {
      out.push_back({Token::Const, std::string(1, c)});
      ++i;
    } else if (std::string_view("!&|^()=").find(c) != std::string_view::npos) {
      out.push_back({Token::Op, std::string(1, c)});
      ++i;
    } else {
      throw SystemFormatError(lineno, std::string("unexpected character '") + c + "'");
    }
  }
  return out;
}

class AigBuilder {
 public:
  AigBuilder(std::uint32_t num_inputs, std::uint32_t num_latches)
      : next_var_(num_inputs + num_latches + 1) {}

  std::uint32_t land(std::uint32_t a, std::uint32_t b) {
    if (a == 0 || b == 0 || a == (b ^ 1u)) return 0;
    if (a == 1) return b;
    if (b == 1 || a == b) return a;
    AndGate g{2 * next_var_++, std::max(a, b), std::min(a, b)};
    gates.push_back(g);
    return g.lhs;
  }
  std::uint32_t lor(std::uint32_t a, std::uint32_t b) { return land(a ^ 1u, b ^ 1u) ^ 1u; }
  std::uint32_t lxor(std::uint32_t a, std::uint32_t b) { return lor(land(a, b ^ 1u), land(a ^ 1u, b)); }

  std::vector<AndGate> gates;
  std::uint32_t max_var() const { return next_var_ - 1; }

 private:
  std::uint32_t next_var_;
};

class ExprParser {
 public:
  ExprParser(const std::vector<Token>& toks, std::size_t pos, std::size_t lineno,
             const std::map<std::string, std::uint32_t>& names, AigBuilder& aig)
      : toks_(toks), pos_(pos), lineno_(lineno), names_(names), aig_(aig) {}

  std::uint32_t parse() {
    const std::uint32_t r = parse_or();
    if (pos_ != toks_.size()) fail("trailing tokens in expression");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SystemFormatError(lineno_, what); }
  bool accept(const char* op) {
    if (pos_ < toks_.size() && toks_[pos_].kind == Token::Op && toks_[pos_].text == op) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::uint32_t parse_or() {
    std::uint32_t a = parse_xor();
    while (accept("|")) a = aig_.lor(a, parse_xor());
    return a;
  }
  std::uint32_t parse_xor() {
    std::uint32_t a = parse_and();
    while (accept("^")) a = aig_.lxor(a, parse_and());
    return a;
  }
  std::uint32_t parse_and() {
    std::uint32_t a = parse_unary();
    while (accept("&")) a = aig_.land(a, parse_unary());
    return a;
  }
  std::uint32_t parse_unary() {
    if (accept("!")) return parse_unary() ^ 1u;
    if (accept("(")) {
      const std::uint32_t a = parse_or();
      if (!accept(")")) fail("missing ')'");
      return a;
    }
    if (pos_ >= toks_.size()) fail("expression ends early");
    const Token& t = toks_[pos_++];
    if (t.kind == Token::Const) return t.text == "1" ? 1u : 0u;
    if (t.kind == Token::Name) {
      auto it = names_.find(t.text);
      if (it == names_.end()) fail("unknown name '" + t.text + "'");
      return it->second;
    }
    fail("unexpected '" + t.text + "'");
  }

  const std::vector<Token>& toks_;
  std::size_t pos_;
  std::size_t lineno_;
  const std::map<std::string, std::uint32_t>& names_;
  AigBuilder& aig_;
};

struct Line {
  std::size_t number;
  std::vector<Token> toks;
};

}  // namespace

TextSystem parse_system(std::string_view text) {
  std::vector<Line> lines;
  {
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      auto toks = tokenize(line, lineno);
      if (!toks.empty()) lines.push_back({lineno, std::move(toks)});
      start = end + 1;
    }
  }

  std::vector<std::string> latch_names, input_names;
  for (const Line& l : lines) {
    const std::string& kw = l.toks[0].text;
    if (kw != "latches" && kw != "inputs") continue;
    auto& dest = kw == "latches" ? latch_names : input_names;
    for (std::size_t i = 1; i < l.toks.size(); ++i) {
      if (l.toks[i].kind != Token::Name) throw SystemFormatError(l.number, "expected a name");
      dest.push_back(l.toks[i].text);
    }
  }
  const auto nl = static_cast<std::uint32_t>(latch_names.size());
  const auto ni = static_cast<std::uint32_t>(input_names.size());

  // AIG variables: inputs 1..I, latches I+1..I+L
  std::map<std::string, std::uint32_t> aig_lit;
  std::map<std::string, std::uint32_t> latch_index;
  for (std::uint32_t j = 0; j < ni; ++j)
    if (!aig_lit.emplace(input_names[j], 2 * (j + 1)).second)
      throw SystemFormatError(0, "duplicate name '" + input_names[j] + "'");
  for (std::uint32_t i = 0; i < nl; ++i) {
    if (!aig_lit.emplace(latch_names[i], 2 * (ni + 1 + i)).second)
      throw SystemFormatError(0, "duplicate name '" + latch_names[i] + "'");
    latch_index[latch_names[i]] = i;
  }

  AigBuilder aig(ni, nl);
  std::vector<std::optional<std::uint32_t>> next(nl);
  Cnf init, property;

  auto clause_of = [&](const Line& l) {
    std::vector<Lit> lits;
    for (std::size_t i = 1; i < l.toks.size(); ++i) {
      bool neg = false;
      if (l.toks[i].kind == Token::Op && l.toks[i].text == "!") {
        neg = true;
        if (++i >= l.toks.size()) throw SystemFormatError(l.number, "dangling '!'");
      }
      auto it = latch_index.find(l.toks[i].text);
      if (l.toks[i].kind != Token::Name || it == latch_index.end())
        throw SystemFormatError(l.number, "expected a latch name, got '" + l.toks[i].text + "'");
      lits.push_back(Lit(Var{it->second + 1}, neg));
    }
    auto c = Clause::try_make(std::move(lits));
    if (!c) throw SystemFormatError(l.number, "tautological clause");
    return *c;
  };

  for (const Line& l : lines) {
    const std::string& kw = l.toks[0].text;
    if (kw == "latches" || kw == "inputs") continue;
    if (kw == "init") {
      init.push_back(clause_of(l));
    } else if (kw == "property") {
      property.push_back(clause_of(l));
    } else if (kw == "next") {
      if (l.toks.size() < 4 || l.toks[2].text != "=")
        throw SystemFormatError(l.number, "expected 'next NAME = EXPR'");
      auto it = latch_index.find(l.toks[1].text);
      if (it == latch_index.end()) throw SystemFormatError(l.number, "unknown latch '" + l.toks[1].text + "'");
      if (next[it->second]) throw SystemFormatError(l.number, "second 'next' for '" + l.toks[1].text + "'");
      next[it->second] = ExprParser(l.toks, 3, l.number, aig_lit, aig).parse();
    } else {
      throw SystemFormatError(l.number, "unknown keyword '" + kw + "'");
    }
  }

  TextSystem out;
  aiger::AigModel& m = out.model;
  for (std::uint32_t j = 0; j < ni; ++j) m.inputs.push_back(2 * (j + 1));
  for (std::uint32_t i = 0; i < nl; ++i) {
    if (!next[i]) throw SystemFormatError(0, "latch '" + latch_names[i] + "' has no next-state function");
    m.latches.push_back(aiger::Latch{2 * (ni + 1 + i), *next[i], aiger::Reset::Uninit});
  }
  m.gates = aig.gates;
  m.max_index = aig.max_var();
  m.outputs.push_back(0);
  for (std::uint32_t j = 0; j < ni; ++j) m.input_origin.push_back(static_cast<int>(j));
  for (std::uint32_t i = 0; i < nl; ++i) m.latch_origin.push_back(static_cast<int>(i));

  aiger::EncodedTransition t = aiger::encode_transition(m);
  out.system = TransitionSystem(nl, ni, t.num_aux, std::move(init), std::move(t.trans), std::move(property),
                                {}, std::move(t.netlist));
  out.system.latch_names = latch_names;
  out.system.input_names = input_names;
  return out;
}

TextSystem read_system_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_system(text);
}

}  // namespace relic
