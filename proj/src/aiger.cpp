#include "relic/aiger.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

namespace relic::aiger {

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  [[nodiscard]] std::size_t pos() const { return pos_; }
  [[nodiscard]] bool eof() const { return pos_ >= text_.size(); }
  [[nodiscard]] char peek() const { return eof() ? '\0' : text_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_, what); }

  std::uint32_t read_uint(const char* what) {
    if (eof() || peek() < '0' || peek() > '9') fail(std::string("expected ") + what);
    std::uint64_t value = 0;
    while (!eof() && peek() >= '0' && peek() <= '9') {
      value = value * 10 + static_cast<std::uint64_t>(peek() - '0');
      if (value > 0x7fffffffu) fail(std::string(what) + " too large");
      ++pos_;
    }
    return static_cast<std::uint32_t>(value);
  }

  void expect(char c, const char* what) {
    if (peek() != c) fail(std::string("expected ") + what);
    ++pos_;
  }

  void expect_newline() {
    if (peek() == '\r') ++pos_;
    expect('\n', "newline");
  }

  [[nodiscard]] bool at_newline() const { return peek() == '\n' || peek() == '\r'; }

  std::uint32_t read_varint() {
    std::uint32_t value = 0;
    int shift = 0;
    for (;;) {
      if (eof()) fail("truncated binary gate section");
      const auto byte = static_cast<unsigned char>(text_[pos_++]);
      if (shift > 28) fail("binary delta too large");
      value |= static_cast<std::uint32_t>(byte & 0x7fu) << shift;
      if ((byte & 0x80u) == 0) break;
      shift += 7;
    }
    return value;
  }

  void skip_line() {
    while (!eof() && peek() != '\n') ++pos_;
    if (!eof()) ++pos_;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

void normalize(AndGate& g) {
  if (g.rhs0 < g.rhs1) std::swap(g.rhs0, g.rhs1);
}

Reset reset_from(std::uint32_t value, std::uint32_t latch_lit, Reader& r) {
  if (value == 0) return Reset::Zero;
  if (value == 1) return Reset::One;
  if (value == latch_lit) return Reset::Uninit;
  r.fail("latch reset must be 0, 1 or the latch literal");
}

// Start offset of every input/latch/output/bad/gate line, for diagnostics.
struct Offsets {
  std::vector<std::size_t> inputs, latches, outputs, bad, gates;
};

// Checks definitions and uses against max_index. With offsets, failures are
// ParseErrors at the offending line; without, StructuralErrors.
void check_structure(const AigModel& m, const Offsets* at) {
  auto fail = [&](const std::vector<std::size_t> Offsets::*list, std::size_t i, const std::string& what) {
    if (at) throw ParseError((at->*list)[i], what);
    throw StructuralError("aiger: " + what);
  };
  std::vector<std::uint8_t> defined(m.max_index + 1, 0);
  auto define = [&](std::uint32_t lit, const char* what, const std::vector<std::size_t> Offsets::*list,
                    std::size_t i) {
    if (lit < 2 || (lit & 1u)) fail(list, i, std::string(what) + " literal must be even and positive");
    const std::uint32_t v = lit >> 1;
    if (v > m.max_index) fail(list, i, std::string(what) + " index out of range");
    if (defined[v]) fail(list, i, "variable " + std::to_string(v) + " defined twice");
    defined[v] = 1;
  };
  for (std::size_t i = 0; i < m.inputs.size(); ++i) define(m.inputs[i], "input", &Offsets::inputs, i);
  for (std::size_t i = 0; i < m.latches.size(); ++i) define(m.latches[i].lit, "latch", &Offsets::latches, i);
  for (std::size_t i = 0; i < m.gates.size(); ++i) define(m.gates[i].lhs, "gate", &Offsets::gates, i);

  auto use = [&](std::uint32_t lit, const char* what, const std::vector<std::size_t> Offsets::*list,
                 std::size_t i) {
    const std::uint32_t v = lit >> 1;
    if (v > m.max_index) fail(list, i, std::string(what) + " literal index out of range");
    if (v != 0 && !defined[v]) fail(list, i, std::string(what) + " uses undefined variable " + std::to_string(v));
  };
  for (std::size_t i = 0; i < m.latches.size(); ++i) use(m.latches[i].next, "next-state", &Offsets::latches, i);
  for (std::size_t i = 0; i < m.outputs.size(); ++i) use(m.outputs[i], "output", &Offsets::outputs, i);
  for (std::size_t i = 0; i < m.bad.size(); ++i) use(m.bad[i], "bad", &Offsets::bad, i);
  for (std::size_t i = 0; i < m.gates.size(); ++i) {
    const AndGate& g = m.gates[i];
    use(g.rhs0, "gate operand", &Offsets::gates, i);
    use(g.rhs1, "gate operand", &Offsets::gates, i);
    if (g.rhs0 >= g.lhs || g.rhs1 >= g.lhs)
      fail(&Offsets::gates, i, "non-monotone gate " + std::to_string(g.lhs) + " (operands must be smaller)");
  }
}

}  // namespace

std::uint32_t AigModel::property_literal() const {
  if (!bad.empty()) return bad.front();
  if (outputs.size() == 1) return outputs.front();
  throw StructuralError("model has no unique property literal");
}

bool AigModel::canonical() const {
  const auto ni = static_cast<std::uint32_t>(inputs.size());
  const auto nl = static_cast<std::uint32_t>(latches.size());
  const auto na = static_cast<std::uint32_t>(gates.size());
  if (max_index != ni + nl + na) return false;
  for (std::uint32_t j = 0; j < ni; ++j)
    if (inputs[j] != 2 * (j + 1)) return false;
  for (std::uint32_t i = 0; i < nl; ++i)
    if (latches[i].lit != 2 * (ni + 1 + i)) return false;
  for (std::uint32_t g = 0; g < na; ++g)
    if (gates[g].lhs != 2 * (ni + nl + 1 + g)) return false;
  return true;
}

void AigModel::validate() const {
  check_structure(*this, nullptr);
  if (!std::is_sorted(gates.begin(), gates.end(),
                      [](const AndGate& a, const AndGate& b) { return a.lhs < b.lhs; }))
    throw StructuralError("aiger: gates not sorted by output literal");
}

AigModel parse_aiger(std::string_view bytes) {
  Reader r(bytes);
  AigModel m;

  const std::size_t header_pos = r.pos();
  std::string magic;
  for (int i = 0; i < 3 && !r.eof(); ++i) magic += r.peek(), r.expect(r.peek(), "magic");
  const bool binary = magic == "aig";
  if (!binary && magic != "aag") throw ParseError(header_pos, "expected 'aag' or 'aig' header");

  std::vector<std::uint32_t> header;
  while (!r.at_newline()) {
    r.expect(' ', "space in header");
    header.push_back(r.read_uint("header field"));
  }
  r.expect_newline();
  if (header.size() < 5 || header.size() > 9)
    throw ParseError(header_pos, "header needs between 5 and 9 fields");
  header.resize(9, 0);
  const std::uint32_t M = header[0], I = header[1], L = header[2], O = header[3], A = header[4];
  const std::uint32_t B = header[5], C = header[6], J = header[7], F = header[8];

  if (C != 0) throw ParseError(header_pos, "invariant constraints are not supported");
  if (J != 0 || F != 0) throw ParseError(header_pos, "justice/fairness properties are not supported");
  if (B > 1 || (B == 0 && O > 1)) throw ParseError(header_pos, "multiple properties are not supported");
  if (B == 0 && O == 0) throw ParseError(header_pos, "no output or bad-state property");
  if (binary && M != I + L + A) throw ParseError(header_pos, "binary header requires M = I + L + A");
  if (static_cast<std::uint64_t>(I) + L + A > M)
    throw ParseError(header_pos, "more definitions than variables");

  m.max_index = M;
  Offsets at;
  for (std::uint32_t j = 0; j < I; ++j) {
    at.inputs.push_back(r.pos());
    if (binary) {
      m.inputs.push_back(2 * (j + 1));
    } else {
      m.inputs.push_back(r.read_uint("input literal"));
      r.expect_newline();
    }
  }
  for (std::uint32_t i = 0; i < L; ++i) {
    at.latches.push_back(r.pos());
    Latch latch;
    if (binary) {
      latch.lit = 2 * (I + 1 + i);
    } else {
      latch.lit = r.read_uint("latch literal");
      r.expect(' ', "space after latch literal");
    }
    latch.next = r.read_uint("next-state literal");
    if (!r.at_newline()) {
      r.expect(' ', "space before reset");
      latch.reset = reset_from(r.read_uint("reset value"), latch.lit, r);
    }
    r.expect_newline();
    m.latches.push_back(latch);
  }
  for (std::uint32_t o = 0; o < O; ++o) {
    at.outputs.push_back(r.pos());
    m.outputs.push_back(r.read_uint("output literal"));
    r.expect_newline();
  }
  for (std::uint32_t b = 0; b < B; ++b) {
    at.bad.push_back(r.pos());
    m.bad.push_back(r.read_uint("bad literal"));
    r.expect_newline();
  }
  for (std::uint32_t g = 0; g < A; ++g) {
    at.gates.push_back(r.pos());
    AndGate gate;
    if (binary) {
      gate.lhs = 2 * (I + L + 1 + g);
      const std::uint32_t d0 = r.read_varint();
      if (d0 == 0 || d0 > gate.lhs) r.fail("invalid binary delta");
      gate.rhs0 = gate.lhs - d0;
      const std::uint32_t d1 = r.read_varint();
      if (d1 > gate.rhs0) r.fail("invalid binary delta");
      gate.rhs1 = gate.rhs0 - d1;
    } else {
      gate.lhs = r.read_uint("gate literal");
      r.expect(' ', "space in gate");
      gate.rhs0 = r.read_uint("gate operand");
      r.expect(' ', "space in gate");
      gate.rhs1 = r.read_uint("gate operand");
      r.expect_newline();
    }
    normalize(gate);
    m.gates.push_back(gate);
  }

  // symbol table and comments
  while (!r.eof()) {
    const char c = r.peek();
    if (c == 'c') break;
    if (c == 'i' || c == 'l' || c == 'o' || c == 'b' || c == 'j' || c == 'f') {
      r.skip_line();
      continue;
    }
    if (c == '\n' || c == '\r') {
      r.skip_line();
      continue;
    }
    r.fail("unexpected content after gate section");
  }

  check_structure(m, &at);
  std::sort(m.gates.begin(), m.gates.end(),
            [](const AndGate& a, const AndGate& b) { return a.lhs < b.lhs; });
  m.input_origin.resize(I);
  m.latch_origin.resize(L);
  for (std::uint32_t j = 0; j < I; ++j) m.input_origin[j] = static_cast<int>(j);
  for (std::uint32_t i = 0; i < L; ++i) m.latch_origin[i] = static_cast<int>(i);
  return m;
}

AigModel read_aiger_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_aiger(bytes);
}

std::string write_ascii(const AigModel& m) {
  std::ostringstream out;
  out << "aag " << m.max_index << ' ' << m.inputs.size() << ' ' << m.latches.size() << ' '
      << m.outputs.size() << ' ' << m.gates.size();
  if (!m.bad.empty()) out << ' ' << m.bad.size();
  out << '\n';
  for (std::uint32_t in : m.inputs) out << in << '\n';
  for (const Latch& l : m.latches) {
    out << l.lit << ' ' << l.next;
    if (l.reset == Reset::One) out << " 1";
    if (l.reset == Reset::Uninit) out << ' ' << l.lit;
    out << '\n';
  }
  for (std::uint32_t o : m.outputs) out << o << '\n';
  for (std::uint32_t b : m.bad) out << b << '\n';
  for (const AndGate& g : m.gates) out << g.lhs << ' ' << g.rhs0 << ' ' << g.rhs1 << '\n';
  return out.str();
}

namespace {

// Canonical renumbering restricted to variables with keep[v] set.
AigModel renumber(const AigModel& m, const std::vector<bool>& keep) {
  std::vector<std::uint32_t> map(m.max_index + 1, 0);
  AigModel out;
  std::uint32_t next = 0;
  for (std::size_t j = 0; j < m.inputs.size(); ++j) {
    const std::uint32_t v = m.inputs[j] >> 1;
    if (!keep[v]) continue;
    map[v] = ++next;
    out.inputs.push_back(2 * next);
    out.input_origin.push_back(j < m.input_origin.size() ? m.input_origin[j] : static_cast<int>(j));
  }
  for (std::size_t i = 0; i < m.latches.size(); ++i) {
    const std::uint32_t v = m.latches[i].lit >> 1;
    if (!keep[v]) continue;
    map[v] = ++next;
    out.latch_origin.push_back(i < m.latch_origin.size() ? m.latch_origin[i] : static_cast<int>(i));
  }
  std::vector<const AndGate*> gates;
  for (const AndGate& g : m.gates)
    if (keep[g.lhs >> 1]) gates.push_back(&g);
  std::sort(gates.begin(), gates.end(), [](const AndGate* a, const AndGate* b) { return a->lhs < b->lhs; });
  for (const AndGate* g : gates) map[g->lhs >> 1] = ++next;

  auto lit = [&](std::uint32_t l) { return 2 * map[l >> 1] + (l & 1u); };
  for (const Latch& l : m.latches) {
    if (!keep[l.lit >> 1]) continue;
    out.latches.push_back(Latch{lit(l.lit), lit(l.next), l.reset});
  }
  for (const AndGate* g : gates) {
    AndGate ng{lit(g->lhs), lit(g->rhs0), lit(g->rhs1)};
    normalize(ng);
    out.gates.push_back(ng);
  }
  for (std::uint32_t o : m.outputs) out.outputs.push_back(keep[o >> 1] || (o >> 1) == 0 ? lit(o) : 0);
  for (std::uint32_t b : m.bad) out.bad.push_back(keep[b >> 1] || (b >> 1) == 0 ? lit(b) : 0);
  out.max_index = next;
  return out;
}

}  // namespace

AigModel canonicalize(const AigModel& m) {
  return renumber(m, std::vector<bool>(m.max_index + 1, true));
}

AigModel cone_of_influence(const AigModel& m) {
  std::vector<bool> keep(m.max_index + 1, false);
  std::vector<const AndGate*> gate_of(m.max_index + 1, nullptr);
  std::vector<const Latch*> latch_of(m.max_index + 1, nullptr);
  for (const AndGate& g : m.gates) gate_of[g.lhs >> 1] = &g;
  for (const Latch& l : m.latches) latch_of[l.lit >> 1] = &l;

  std::vector<std::uint32_t> work{m.property_literal() >> 1};
  while (!work.empty()) {
    const std::uint32_t v = work.back();
    work.pop_back();
    if (v == 0 || keep[v]) continue;
    keep[v] = true;
    if (const AndGate* g = gate_of[v]) {
      work.push_back(g->rhs0 >> 1);
      work.push_back(g->rhs1 >> 1);
    } else if (const Latch* l = latch_of[v]) {
      work.push_back(l->next >> 1);
    }
  }
  AigModel out = renumber(m, keep);
  // properties other than the checked one are meaningless after reduction
  if (!out.bad.empty()) {
    out.bad.resize(1);
    out.outputs.clear();
  }
  return out;
}

AigModel monitor_property(const AigModel& m) {
  const std::uint32_t prop = m.property_literal();
  const std::uint32_t v = prop >> 1;
  if (v == 0) return m;
  for (const Latch& l : m.latches)
    if ((l.lit >> 1) == v) return m;

  AigModel out = m;
  out.max_index = m.max_index + 1;
  const std::uint32_t monitor = 2 * out.max_index;
  out.latches.push_back(Latch{monitor, prop, Reset::Zero});
  if (out.latch_origin.size() < m.latches.size()) {
    out.latch_origin.resize(m.latches.size());
    for (std::size_t i = 0; i < m.latches.size(); ++i) out.latch_origin[i] = static_cast<int>(i);
  }
  out.latch_origin.push_back(-1);
  out.bad = {monitor};
  out.outputs.clear();
  return canonicalize(out);
}

std::vector<Lit> extract_literal_invariants(const AigModel& m) {
  enum : std::uint8_t { F = 0, T = 1, X = 2 };
  const std::size_t nl = m.latches.size();
  std::vector<bool> candidate(nl, false);
  for (std::size_t i = 0; i < nl; ++i) candidate[i] = m.latches[i].reset != Reset::Uninit;

  std::vector<std::uint8_t> value(m.max_index + 1, X);
  auto eval = [&](std::uint32_t lit) -> std::uint8_t {
    const std::uint8_t v = value[lit >> 1];
    if (v == X) return X;
    return static_cast<std::uint8_t>(v ^ (lit & 1u));
  };

  for (bool changed = true; changed;) {
    changed = false;
    std::fill(value.begin(), value.end(), X);
    value[0] = F;
    for (std::size_t i = 0; i < nl; ++i)
      if (candidate[i]) value[m.latches[i].lit >> 1] = m.latches[i].reset == Reset::One ? T : F;
    for (const AndGate& g : m.gates) {
      const std::uint8_t a = eval(g.rhs0);
      const std::uint8_t b = eval(g.rhs1);
      value[g.lhs >> 1] = (a == F || b == F) ? F : (a == T && b == T) ? T : X;
    }
    for (std::size_t i = 0; i < nl; ++i) {
      if (!candidate[i]) continue;
      const std::uint8_t want = m.latches[i].reset == Reset::One ? T : F;
      if (eval(m.latches[i].next) != want) {
        candidate[i] = false;
        changed = true;
      }
    }
  }

  std::vector<Lit> out;
  for (std::size_t i = 0; i < nl; ++i)
    if (candidate[i])
      out.push_back(Lit(Var{static_cast<std::uint32_t>(i + 1)}, m.latches[i].reset == Reset::Zero));
  return out;
}

EncodedTransition encode_transition(const AigModel& m) {
  if (!m.canonical()) throw StructuralError("encode_transition requires a canonical model");
  const auto ni = static_cast<std::uint32_t>(m.inputs.size());
  const auto nl = static_cast<std::uint32_t>(m.latches.size());
  const auto na = static_cast<std::uint32_t>(m.gates.size());

  // system layout: latches 1..L, inputs L+1..L+I, primed, then one aux per gate
  auto var_of = [&](std::uint32_t v) -> Var {
    if (v <= ni) return Var{nl + v};
    if (v <= ni + nl) return Var{v - ni};
    return Var{2 * nl + ni + (v - ni - nl)};
  };

  EncodedTransition out;
  out.num_aux = na;
  // a term is either a literal or a constant; constants simplify the clause
  struct Term {
    std::optional<Lit> lit;
    bool constant = false;
  };
  auto term = [&](std::uint32_t aig_lit) -> Term {
    if ((aig_lit >> 1) == 0) return Term{std::nullopt, (aig_lit & 1u) != 0};
    return Term{Lit(var_of(aig_lit >> 1), (aig_lit & 1u) != 0), false};
  };
  auto neg = [](Term t) {
    if (t.lit) t.lit = ~*t.lit;
    else t.constant = !t.constant;
    return t;
  };
  auto emit = [&](std::initializer_list<Term> terms) {
    std::vector<Lit> lits;
    for (const Term& t : terms) {
      if (!t.lit) {
        if (t.constant) return;
        continue;
      }
      lits.push_back(*t.lit);
    }
    if (auto c = Clause::try_make(std::move(lits))) out.trans.push_back(std::move(*c));
  };

  for (const AndGate& g : m.gates) {
    const Term a = term(g.lhs), b = term(g.rhs0), c = term(g.rhs1);
    emit({neg(a), b});
    emit({neg(a), c});
    emit({a, neg(b), neg(c)});
  }
  for (std::uint32_t i = 0; i < nl; ++i) {
    const Term p{Lit(Var{nl + ni + 1 + i}), false};
    const Term n = term(m.latches[i].next);
    emit({neg(p), n});
    emit({p, neg(n)});
  }

  out.netlist.num_inputs = ni;
  out.netlist.num_latches = nl;
  for (const AndGate& g : m.gates) out.netlist.gates.push_back(Netlist::Gate{g.lhs, g.rhs0, g.rhs1});
  for (const Latch& l : m.latches) out.netlist.next.push_back(l.next);
  return out;
}

TransitionSystem encode(const AigModel& model, const std::vector<Lit>& invariants) {
  const AigModel m = model.canonical() ? model : canonicalize(model);
  EncodedTransition t = encode_transition(m);
  const auto ni = static_cast<std::uint32_t>(m.inputs.size());
  const auto nl = static_cast<std::uint32_t>(m.latches.size());

  Cnf init;
  for (std::uint32_t i = 0; i < nl; ++i) {
    if (m.latches[i].reset == Reset::Uninit) continue;
    init.push_back(Clause{Lit(Var{1 + i}, m.latches[i].reset == Reset::Zero)});
  }

  Cnf property;
  const std::uint32_t prop = m.property_literal();
  const std::uint32_t pv = prop >> 1;
  if (pv == 0) {
    if (prop == 1) property.push_back(Clause{});  // bad is constant true
  } else if (pv > ni && pv <= ni + nl) {
    property.push_back(Clause{Lit(Var{pv - ni}, (prop & 1u) == 0)});
  } else {
    throw StructuralError("property literal must be constant or a latch; run monitor_property first");
  }

  return TransitionSystem(nl, ni, t.num_aux, std::move(init), std::move(t.trans), std::move(property),
                          invariants, std::move(t.netlist));
}

Prepared prepare(const AigModel& parsed, const PrepareOptions& options) {
  Prepared p;
  p.original = parsed;
  AigModel m = monitor_property(parsed);
  p.monitored = m.latches.size() != parsed.latches.size();
  p.reduced = options.cone_of_influence ? cone_of_influence(m) : canonicalize(m);
  if (options.literal_invariants) p.invariants = extract_literal_invariants(p.reduced);
  p.system = encode(p.reduced, p.invariants);
  return p;
}

}  // namespace relic::aiger
