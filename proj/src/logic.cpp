#include "relic/logic.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace relic {

Lit Lit::from_dimacs(long long value) {
  if (value == 0) throw StructuralError("literal 0 does not name a variable");
  const auto index = static_cast<std::uint32_t>(value < 0 ? -value : value);
  return Lit(Var{index}, value < 0);
}

namespace detail {

void canonicalize(std::vector<Lit>& lits) {
  for (Lit l : lits)
    if (l.var().index == 0) throw StructuralError("variable index 0 in literal set");
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
}

bool has_complementary_pair(const std::vector<Lit>& sorted) {
  // complementary literals are adjacent in code order
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].var() == sorted[i - 1].var()) return true;
  return false;
}

}  // namespace detail

Clause negate(const Cube& s) {
  std::vector<Lit> out;
  out.reserve(s.size());
  for (Lit l : s) out.push_back(~l);
  return Clause(std::move(out));
}

Cube negate(const Clause& c) {
  std::vector<Lit> out;
  out.reserve(c.size());
  for (Lit l : c) out.push_back(~l);
  return Cube(std::move(out));
}

bool subsumes(const Clause& c, const Clause& d) {
  if (c.size() > d.size()) return false;
  return std::includes(d.begin(), d.end(), c.begin(), c.end());
}

std::string to_text(std::span<const Lit> lits) {
  std::string out;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(lits[i].to_dimacs());
  }
  return out;
}

std::vector<Lit> parse_lits(std::string_view line) {
  std::vector<Lit> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r'))
      ++pos;
    if (pos >= line.size()) break;
    long long value = 0;
    const char* first = line.data() + pos;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || (ptr != last && *ptr != ' ' && *ptr != '\t' && *ptr != '\r'))
      throw StructuralError("malformed literal list: '" + std::string(line) + "'");
    pos += static_cast<std::size_t>(ptr - first);
    if (value == 0) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r'))
        ++pos;
      if (pos != line.size())
        throw StructuralError("literal after terminating 0: '" + std::string(line) + "'");
      break;
    }
    out.push_back(Lit::from_dimacs(value));
  }
  return out;
}

bool Assignment::value(Var v) const {
  if (v.index == 0 || v.index >= values_.size())
    throw StructuralError("variable " + std::to_string(v.index) + " outside assignment");
  return values_[v.index];
}

void Assignment::set(Var v, bool value) {
  if (v.index == 0 || v.index >= values_.size())
    throw StructuralError("variable " + std::to_string(v.index) + " outside assignment");
  values_[v.index] = value;
}

bool Assignment::satisfies(const Clause& c) const {
  return std::any_of(c.begin(), c.end(), [&](Lit l) { return satisfies(l); });
}

bool Assignment::satisfies(const Cube& s) const {
  return std::all_of(s.begin(), s.end(), [&](Lit l) { return satisfies(l); });
}

bool Assignment::satisfies(const Cnf& f) const {
  return std::all_of(f.begin(), f.end(), [&](const Clause& c) { return satisfies(c); });
}

State Netlist::step(const State& state, const InputVector& inputs) const {
  std::vector<bool> value(1 + num_inputs + num_latches + gates.size(), false);
  for (std::uint32_t j = 0; j < num_inputs; ++j) value[1 + j] = inputs[j];
  for (std::uint32_t i = 0; i < num_latches; ++i) value[1 + num_inputs + i] = state[i];
  auto eval = [&](std::uint32_t lit) { return value[lit >> 1] != ((lit & 1u) != 0); };
  for (const Gate& g : gates) value[g.lhs >> 1] = eval(g.rhs0) && eval(g.rhs1);
  State out(num_latches);
  for (std::uint32_t i = 0; i < num_latches; ++i) out[i] = eval(next[i]);
  return out;
}

void Netlist::validate() const {
  const std::uint32_t first_gate = 1 + num_inputs + num_latches;
  const std::uint32_t max_var = first_gate + static_cast<std::uint32_t>(gates.size()) - 1;
  if (next.size() != num_latches) throw StructuralError("netlist: next-state count mismatch");
  for (std::size_t g = 0; g < gates.size(); ++g) {
    const Gate& gate = gates[g];
    if (gate.lhs != 2 * (first_gate + static_cast<std::uint32_t>(g)))
      throw StructuralError("netlist: gates must be numbered consecutively");
    if (gate.rhs0 >= gate.lhs || gate.rhs1 >= gate.lhs)
      throw StructuralError("netlist: gate operand not below gate");
  }
  for (std::uint32_t n : next)
    if ((n >> 1) > max_var) throw StructuralError("netlist: next-state literal out of range");
}

TransitionSystem::TransitionSystem(std::uint32_t num_latches, std::uint32_t num_inputs,
                                   std::uint32_t num_aux, Cnf init, Cnf trans, Cnf property,
                                   std::vector<Lit> invariants, std::optional<Netlist> netlist)
    : latches_(num_latches),
      inputs_(num_inputs),
      aux_(num_aux),
      init_(std::move(init)),
      trans_(std::move(trans)),
      property_(std::move(property)),
      invariants_(std::move(invariants)),
      netlist_(std::move(netlist)) {
  validate();
}

void TransitionSystem::validate() const {
  auto latch_only = [&](const Cnf& f, const char* what) {
    for (const Clause& c : f)
      for (Lit l : c)
        if (!is_latch(l.var()))
          throw StructuralError(std::string(what) + " mentions non-latch variable " +
                                std::to_string(l.var().index));
  };
  latch_only(init_, "initial condition");
  latch_only(property_, "property");
  for (Lit l : invariants_)
    if (!is_latch(l.var())) throw StructuralError("literal invariant over non-latch variable");
  for (const Clause& c : trans_)
    for (Lit l : c)
      if (l.var().index == 0 || l.var().index > num_vars())
        throw StructuralError("transition relation variable out of range: " +
                              std::to_string(l.var().index));
  if (netlist_) {
    if (netlist_->num_latches != latches_ || netlist_->num_inputs != inputs_)
      throw StructuralError("netlist shape does not match the system");
    netlist_->validate();
  }
}

VarKind TransitionSystem::kind(Var v) const {
  if (v.index == 0 || v.index > num_vars())
    throw StructuralError("unknown variable " + std::to_string(v.index));
  if (v.index <= latches_) return VarKind::Latch;
  if (v.index <= latches_ + inputs_) return VarKind::Input;
  if (v.index <= 2 * latches_ + inputs_) return VarKind::Primed;
  return VarKind::Auxiliary;
}

Lit TransitionSystem::prime(Lit l) const {
  if (!is_latch(l.var()))
    throw StructuralError("cannot prime non-latch variable " + std::to_string(l.var().index));
  return Lit(primed(l.var().index - 1), l.negated());
}

Lit TransitionSystem::unprime(Lit l) const {
  const std::uint32_t v = l.var().index;
  if (v <= latches_ + inputs_ || v > 2 * latches_ + inputs_)
    throw StructuralError("cannot unprime non-primed variable " + std::to_string(v));
  return Lit(latch(v - latches_ - inputs_ - 1), l.negated());
}

namespace {
template <class Set, class F>
Set map_lits(const Set& s, F&& f) {
  std::vector<Lit> out;
  out.reserve(s.size());
  for (Lit l : s) out.push_back(f(l));
  return Set(std::move(out));
}
}  // namespace

Clause TransitionSystem::prime(const Clause& c) const {
  return map_lits(c, [&](Lit l) { return prime(l); });
}
Cube TransitionSystem::prime(const Cube& s) const {
  return map_lits(s, [&](Lit l) { return prime(l); });
}
Cnf TransitionSystem::prime(const Cnf& f) const {
  Cnf out;
  out.reserve(f.size());
  for (const Clause& c : f) out.push_back(prime(c));
  return out;
}
Clause TransitionSystem::unprime(const Clause& c) const {
  return map_lits(c, [&](Lit l) { return unprime(l); });
}
Cube TransitionSystem::unprime(const Cube& s) const {
  return map_lits(s, [&](Lit l) { return unprime(l); });
}

Cube TransitionSystem::state_cube(const State& state) const {
  if (state.size() != latches_) throw StructuralError("state width does not match latch count");
  std::vector<Lit> lits;
  lits.reserve(latches_);
  for (std::uint32_t i = 0; i < latches_; ++i) lits.push_back(Lit(latch(i), !state[i]));
  return Cube(std::move(lits));
}

State TransitionSystem::state_of(const Cube& s) const {
  if (s.size() != latches_) throw StructuralError("cube does not describe a full state");
  State out(latches_);
  for (Lit l : s) {
    if (!is_latch(l.var())) throw StructuralError("state cube mentions non-latch variable");
    out[l.var().index - 1] = !l.negated();
  }
  return out;
}

bool TransitionSystem::holds(const Clause& c, const State& state) const {
  for (Lit l : c) {
    if (!is_latch(l.var())) throw StructuralError("evaluating non-latch literal on a state");
    if (state[l.var().index - 1] != l.negated()) return true;
  }
  return false;
}

bool TransitionSystem::holds(const Cnf& f, const State& state) const {
  return std::all_of(f.begin(), f.end(), [&](const Clause& c) { return holds(c, state); });
}

bool TransitionSystem::holds(const Cube& s, const State& state) const {
  for (Lit l : s) {
    if (!is_latch(l.var())) throw StructuralError("evaluating non-latch literal on a state");
    if (state[l.var().index - 1] == l.negated()) return false;
  }
  return true;
}

std::uint64_t TransitionSystem::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&](std::string_view s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ull;
    }
  };
  feed("L" + std::to_string(latches_) + " I" + std::to_string(inputs_) + " A" +
       std::to_string(aux_) + "\n");
  auto section = [&](const char* tag, const Cnf& f) {
    feed(tag);
    for (const Clause& c : f) {
      feed(to_text(c));
      feed("\n");
    }
  };
  section("init\n", init_);
  section("trans\n", trans_);
  section("property\n", property_);
  return h;
}

}  // namespace relic
