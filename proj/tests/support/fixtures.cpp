#include "fixtures.hpp"

#include <algorithm>
#include <stdexcept>

#include "relic/sat.hpp"

namespace relic::testing {

namespace {

Lit primed(Lit l) { return Lit(Var{l.var().index + 7}, l.negated()); }

}  // namespace

TransitionSystem toy7() {
  Cnf init{{x0()}, {x1(true)}, {xx()}, {y0(), y1()}, {y0(true), y1(true)}, {yy()}, {zz()}};
  const Lit X0 = primed(x0()), X1 = primed(x1()), X = primed(xx());
  const Lit Y0 = primed(y0()), Y1 = primed(y1()), Y = primed(yy()), Z = primed(zz());
  Cnf trans{
      // x0' = ~x0, x1' = ~x1
      {X0, x0()}, {~X0, x0(true)},
      {X1, x1()}, {~X1, x1(true)},
      // x' = x0 | x1
      {~X, x0(), x1()}, {X, x0(true)}, {X, x1(true)},
      // y0' = x & ~y0, y1' = x & ~y1
      {~Y0, xx()}, {~Y0, y0(true)}, {Y0, xx(true), y0()},
      {~Y1, xx()}, {~Y1, y1(true)}, {Y1, xx(true), y1()},
      // y' = y0 | y1
      {~Y, y0(), y1()}, {Y, y0(true)}, {Y, y1(true)},
      // z' = x & y
      {~Z, xx()}, {~Z, yy()}, {Z, xx(true), yy(true)},
  };
  TransitionSystem sys(7, 0, 0, std::move(init), std::move(trans), Cnf{{zz()}});
  sys.latch_names = {"x0", "x1", "x", "y0", "y1", "y", "z"};
  return sys;
}

Cnf toy7_reachable() {
  return {{x0(), x1()}, {x0(true), x1(true)}, {xx()}, {y0(), y1()}, {y0(true), y1(true)}, {yy()}, {zz()}};
}

Cube toy7_state(const std::string& bits) {
  if (bits.size() != 7) throw std::invalid_argument("toy7 state needs 7 bits");
  std::vector<Lit> lits;
  for (std::uint32_t i = 0; i < 7; ++i) lits.push_back(Lit(Var{i + 1}, bits[i] == '0'));
  return Cube(std::move(lits));
}

aiger::AigModel random_model(std::mt19937_64& rng, const RandomShape& shape) {
  auto pick = [&](std::uint32_t lo, std::uint32_t hi) {
    return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
  };
  auto coin = [&] { return pick(0, 1) == 1; };

  const std::uint32_t nl = pick(shape.min_latches, shape.max_latches);
  const std::uint32_t ni = pick(0, shape.max_inputs);
  const std::uint32_t ng = pick(shape.min_gates, shape.max_gates);

  aiger::AigModel m;
  for (std::uint32_t j = 0; j < ni; ++j) {
    m.inputs.push_back(2 * (j + 1));
    m.input_origin.push_back(static_cast<int>(j));
  }
  for (std::uint32_t i = 0; i < nl; ++i) {
    aiger::Latch l;
    l.lit = 2 * (ni + 1 + i);
    const unsigned r = pick(0, 99);
    l.reset = r < shape.uninit_percent ? aiger::Reset::Uninit : (coin() ? aiger::Reset::Zero : aiger::Reset::One);
    m.latches.push_back(l);
    m.latch_origin.push_back(static_cast<int>(i));
  }
  // signal pool: inputs, latches, then gates; operands are drawn from the
  // whole pool so the logic stays shallow and balanced
  std::uint32_t var = ni + nl;
  auto any_lit = [&] { return 2 * pick(1, var) + (coin() ? 1 : 0); };
  auto latch_lit = [&] { return 2 * pick(ni + 1, ni + nl) + (coin() ? 1 : 0); };
  auto gate = [&](std::uint32_t a, std::uint32_t b) {
    const std::uint32_t lhs = 2 * ++var;
    m.gates.push_back(aiger::AndGate{lhs, std::max(a, b), std::min(a, b)});
    return lhs;
  };
  std::vector<std::uint32_t> funcs;
  while (m.gates.size() < ng) {
    const std::uint32_t a = any_lit(), b = any_lit();
    if ((a >> 1) == (b >> 1)) continue;
    switch (pick(0, 3)) {
      case 0: {
        // xor
        const std::uint32_t p = gate(a, b ^ 1u), q = gate(a ^ 1u, b);
        funcs.push_back(gate(p ^ 1u, q ^ 1u) ^ 1u);
        break;
      }
      case 1: {
        // mux on a fresh select
        const std::uint32_t sel = any_lit();
        const std::uint32_t p = gate(sel, a), q = gate(sel ^ 1u, b);
        funcs.push_back(gate(p ^ 1u, q ^ 1u) ^ 1u);
        break;
      }
      default:
        funcs.push_back(gate(a, b));
    }
  }
  // next states mix free logic with shift and counter structure, which
  // gives deeper reachability than uniform random logic
  auto latch_of = [&](std::uint32_t i) { return m.latches[i].lit; };
  std::uint32_t carry = 1;
  for (std::uint32_t i = 0; i < nl; ++i) {
    aiger::Latch& l = m.latches[i];
    switch (pick(0, 3)) {
      case 0: l.next = any_lit(); break;
      case 1: l.next = funcs.empty() ? any_lit() : funcs[pick(0, static_cast<std::uint32_t>(funcs.size() - 1))] ^ (coin() ? 1u : 0u); break;
      case 2: l.next = i == 0 ? any_lit() : latch_of(i - 1) ^ (coin() ? 1u : 0u); break;
      default: {
        // counter bit: l ^ carry, carry &= l
        const std::uint32_t x = latch_of(i);
        if (carry == 1) {
          l.next = x ^ 1u;
          carry = coin() ? x : gate(x, any_lit());
        } else {
          const std::uint32_t p = gate(x, carry ^ 1u), q = gate(x ^ 1u, carry);
          l.next = gate(p ^ 1u, q ^ 1u) ^ 1u;
          carry = gate(carry, x);
        }
      }
    }
  }
  // bad: a cube of one to four latch literals conjoined with a signal
  std::uint32_t bad = any_lit();
  for (std::uint32_t j = pick(1, 4); j > 0; --j) {
    const std::uint32_t l = latch_lit();
    if ((l >> 1) != (bad >> 1)) bad = gate(bad, l);
  }
  m.max_index = var;
  m.bad.push_back(bad);
  m.validate();
  return m;
}

std::vector<RandomCase> random_suite(std::size_t count, std::uint64_t seed, const RandomShape& shape) {
  std::vector<RandomCase> out;
  const std::size_t cap = count * 6 / 10;
  std::size_t safe = 0, unsafe = 0;
  for (std::uint64_t attempt = 0; out.size() < count; ++attempt) {
    if (attempt > 100 * count) throw std::runtime_error("random_suite: cannot balance verdicts");
    RandomCase c;
    c.seed = seed * 1000003u + attempt;
    std::mt19937_64 rng(c.seed);
    c.model = random_model(rng, shape);
    c.plain = aiger::prepare(c.model, aiger::PrepareOptions{false, false});
    c.truth = oracle::bfs_verdict(c.plain.system);
    std::size_t& bucket = c.truth.outcome == Outcome::Safe ? safe : unsafe;
    if (bucket >= cap) continue;
    ++bucket;
    c.prepared = aiger::prepare(c.model);
    out.push_back(std::move(c));
  }
  return out;
}

State simulate(const aiger::AigModel& m, const State& latches, const InputVector& inputs) {
  std::vector<bool> val(m.max_index + 1, false);
  for (std::size_t j = 0; j < m.inputs.size(); ++j) val[m.inputs[j] / 2] = inputs[j];
  for (std::size_t i = 0; i < m.latches.size(); ++i) val[m.latches[i].lit / 2] = latches[i];
  auto lit = [&](std::uint32_t l) { return val[l / 2] != ((l & 1u) != 0); };
  for (const aiger::AndGate& g : m.gates) val[g.lhs / 2] = lit(g.rhs0) && lit(g.rhs1);
  State next(m.latches.size());
  for (std::size_t i = 0; i < m.latches.size(); ++i) next[i] = lit(m.latches[i].next);
  return next;
}

bool brute_sat(const std::vector<std::vector<Lit>>& clauses, std::uint32_t num_vars) {
  // 64 assignments per word: variables 1..6 vary inside a word, the rest
  // select the block.
  static constexpr std::uint64_t kPattern[6] = {0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull,
                                                0xf0f0f0f0f0f0f0f0ull, 0xff00ff00ff00ff00ull,
                                                0xffff0000ffff0000ull, 0xffffffff00000000ull};
  const std::uint32_t inner = std::min<std::uint32_t>(num_vars, 6);
  const std::uint64_t valid = inner == 6 ? ~0ull : (1ull << (1u << inner)) - 1;
  const std::uint64_t blocks = num_vars > 6 ? 1ull << (num_vars - 6) : 1;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    std::uint64_t all = valid;
    for (const auto& c : clauses) {
      std::uint64_t any = 0;
      for (Lit l : c) {
        const std::uint32_t v = l.var().index - 1;
        std::uint64_t mask = v < 6 ? kPattern[v] : (((b >> (v - 6)) & 1u) ? ~0ull : 0ull);
        if (l.negated()) mask = ~mask;
        any |= mask;
      }
      all &= any;
      if (all == 0) break;
    }
    if (all != 0) return true;
  }
  return false;
}

bool brute_sat(const Cnf& f, std::uint32_t num_vars) {
  std::vector<std::vector<Lit>> clauses;
  for (const Clause& c : f) clauses.emplace_back(c.begin(), c.end());
  return brute_sat(clauses, num_vars);
}

bool implies(const TransitionSystem& sys, const Cnf& a, const Cnf& b) {
  for (const Clause& c : b) {
    sat::Solver s;
    s.ensure_vars(sys.num_vars());
    for (const Clause& d : a) s.add_clause(d);
    for (Lit l : c) s.add_clause({~l});
    if (s.solve() != sat::Status::Unsat) return false;
  }
  return true;
}

bool fresh_query(const Frames& frames, const QueryRecord& r) {
  const TransitionSystem& sys = frames.system();
  sat::Solver s;
  s.ensure_vars(sys.num_vars());
  for (const Clause& c : frames.formula(r.level)) s.add_clause(c);
  auto add_trans = [&] {
    for (const Clause& c : sys.trans()) s.add_clause(c);
  };
  switch (r.kind) {
    case QueryKind::Bad: {
      add_trans();
      // some property clause false in the primed state
      std::vector<Lit> any;
      for (const Clause& c : sys.property()) {
        const Lit b(s.new_var());
        any.push_back(b);
        for (Lit l : c) s.add_clause({~b, ~sys.prime(l)});
      }
      s.add_clause(any);
      break;
    }
    case QueryKind::RelativeInduction:
    case QueryKind::Propagation:
      add_trans();
      if (r.kind == QueryKind::RelativeInduction) s.add_clause(r.lits);
      for (Lit l : r.lits) s.add_clause({~sys.prime(l)});
      break;
    case QueryKind::Predecessor:
      add_trans();
      for (Lit l : r.lits) s.add_clause({sys.prime(l)});
      break;
    case QueryKind::Initiation:
      for (Lit l : r.lits) s.add_clause({~l});
      break;
    case QueryKind::Intersects:
      for (Lit l : r.lits) s.add_clause({l});
      break;
  }
  return s.solve() == sat::Status::Sat;
}

int fresh_linear_level(const Frames& frames, const Cube& s, int lo, int k) {
  const Clause c = negate(s);
  for (int i = std::max(lo, 0) + 1; i <= k; ++i)
    if (fresh_query(frames, QueryRecord{QueryKind::RelativeInduction, i, {c.begin(), c.end()}, false}))
      return i - 1;
  return k;
}

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Safe: return "Safe";
    case Outcome::Unsafe: return "Unsafe";
    default: return "Unknown";
  }
}

}  // namespace relic::testing
