#include "relic/oracle.hpp"

#include <deque>

namespace relic::oracle {

namespace {

bool lit_true(Lit l, StateBits s) {
  const bool v = ((s >> (l.var().index - 1)) & 1u) != 0;
  return v != l.negated();
}

}  // namespace

Explorer::Explorer(const TransitionSystem& sys) : sys_(sys) {
  if (sys.num_latches() + sys.num_inputs() > kBudget)
    throw BudgetExceeded("oracle: " + std::to_string(sys.num_latches() + sys.num_inputs()) +
                         " latches+inputs exceed the enumeration budget of " + std::to_string(kBudget));
  if (!sys.netlist() && sys.num_aux() > 0)
    throw BudgetExceeded("oracle: system has auxiliary variables but no netlist to simulate");
}

bool Explorer::satisfies(const Clause& c, StateBits s) const {
  for (Lit l : c)
    if (lit_true(l, s)) return true;
  return false;
}

bool Explorer::satisfies(const Cnf& f, StateBits s) const {
  for (const Clause& c : f)
    if (!satisfies(c, s)) return false;
  return true;
}

bool Explorer::initial(StateBits s) const { return satisfies(sys_.init(), s); }
bool Explorer::good(StateBits s) const { return satisfies(sys_.property(), s); }

State Explorer::to_state(StateBits s) const {
  State out(sys_.num_latches());
  for (std::uint32_t i = 0; i < sys_.num_latches(); ++i) out[i] = ((s >> i) & 1u) != 0;
  return out;
}

InputVector Explorer::to_inputs(std::uint64_t in) const {
  InputVector out(sys_.num_inputs());
  for (std::uint32_t j = 0; j < sys_.num_inputs(); ++j) out[j] = ((in >> j) & 1u) != 0;
  return out;
}

std::vector<std::pair<std::uint64_t, StateBits>> Explorer::successors(StateBits s) const {
  const std::uint32_t nl = sys_.num_latches();
  const std::uint32_t ni = sys_.num_inputs();
  std::vector<std::pair<std::uint64_t, StateBits>> out;
  const State cur = to_state(s);
  for (std::uint64_t in = 0; in < (std::uint64_t{1} << ni); ++in) {
    if (sys_.netlist()) {
      const State next = sys_.netlist()->step(cur, to_inputs(in));
      StateBits t = 0;
      for (std::uint32_t i = 0; i < nl; ++i)
        if (next[i]) t |= StateBits{1} << i;
      out.emplace_back(in, t);
      continue;
    }
    // evaluate T directly over every candidate successor
    Assignment a(sys_.num_vars());
    for (std::uint32_t i = 0; i < nl; ++i) a.set(sys_.latch(i), cur[i]);
    for (std::uint32_t j = 0; j < ni; ++j) a.set(sys_.input(j), ((in >> j) & 1u) != 0);
    for (StateBits t = 0; t < num_states(); ++t) {
      for (std::uint32_t i = 0; i < nl; ++i) a.set(sys_.primed(i), ((t >> i) & 1u) != 0);
      if (a.satisfies(sys_.trans())) out.emplace_back(in, t);
    }
  }
  return out;
}

Result bfs_verdict(const TransitionSystem& sys) {
  const Explorer ex(sys);
  const std::uint64_t n = ex.num_states();
  Result r;
  r.reachable.assign(n, false);
  struct Parent {
    StateBits state;
    std::uint64_t input;
  };
  std::vector<Parent> parent(n, Parent{~StateBits{0}, 0});
  std::deque<StateBits> queue;

  auto finish_unsafe = [&](StateBits bad) {
    std::vector<StateBits> chain{bad};
    std::vector<std::uint64_t> ins;
    while (parent[chain.back()].state != ~StateBits{0}) {
      ins.push_back(parent[chain.back()].input);
      chain.push_back(parent[chain.back()].state);
    }
    r.outcome = Outcome::Unsafe;
    for (std::size_t i = chain.size(); i-- > 0;) {
      r.trace.states.push_back(ex.to_state(chain[i]));
      r.trace.inputs.push_back(i > 0 ? ex.to_inputs(ins[i - 1]) : InputVector(sys.num_inputs(), false));
    }
  };

  for (StateBits s = 0; s < n; ++s) {
    if (!ex.initial(s)) continue;
    r.reachable[s] = true;
    queue.push_back(s);
  }
  // initial violations first: they give length-1 traces
  for (StateBits s : queue)
    if (!ex.good(s)) {
      finish_unsafe(s);
      return r;
    }
  while (!queue.empty()) {
    const StateBits s = queue.front();
    queue.pop_front();
    for (const auto& [in, t] : ex.successors(s)) {
      if (r.reachable[t]) continue;
      r.reachable[t] = true;
      parent[t] = Parent{s, in};
      if (!ex.good(t)) {
        finish_unsafe(t);
        return r;
      }
      queue.push_back(t);
    }
  }
  r.outcome = Outcome::Safe;
  return r;
}

Cnf reachable_formula(const TransitionSystem& sys, const std::vector<bool>& reachable) {
  if (sys.num_latches() > 16) throw BudgetExceeded("oracle: reachable-set formula needs <= 16 latches");
  const Explorer ex(sys);
  Cnf out;
  for (StateBits s = 0; s < ex.num_states(); ++s)
    if (!reachable[s]) out.push_back(negate(sys.state_cube(ex.to_state(s))));
  return out;
}

std::vector<bool> reachable_dfs(const TransitionSystem& sys) {
  const std::uint32_t nl = sys.num_latches();
  const std::uint32_t ni = sys.num_inputs();
  if (nl + ni > kBudget) throw BudgetExceeded("oracle: enumeration budget exceeded");
  if (!sys.netlist() && sys.num_aux() > 0) throw BudgetExceeded("oracle: no netlist to simulate");

  // State objects throughout, no bit tricks shared with the BFS path.
  std::vector<bool> seen(std::size_t{1} << nl, false);
  auto index = [&](const State& s) {
    std::size_t v = 0;
    for (std::uint32_t i = nl; i-- > 0;) v = (v << 1) | (s[i] ? 1u : 0u);
    return v;
  };
  auto decode = [&](std::size_t v) {
    State s(nl);
    for (std::uint32_t i = 0; i < nl; ++i) s[i] = (v >> i) & 1u;
    return s;
  };
  auto next_states = [&](const State& s) {
    std::vector<State> out;
    for (std::size_t in = 0; in < (std::size_t{1} << ni); ++in) {
      InputVector iv(ni);
      for (std::uint32_t j = 0; j < ni; ++j) iv[j] = (in >> j) & 1u;
      if (sys.netlist()) {
        out.push_back(sys.netlist()->step(s, iv));
        continue;
      }
      for (std::size_t t = 0; t < seen.size(); ++t) {
        const State cand = decode(t);
        bool ok = true;
        for (const Clause& c : sys.trans()) {
          bool sat = false;
          for (Lit l : c) {
            const Var v = l.var();
            bool val = false;
            if (sys.is_latch(v)) val = s[v.index - 1];
            else if (sys.kind(v) == VarKind::Input) val = iv[v.index - 1 - nl];
            else val = cand[v.index - 1 - nl - ni];
            if (val != l.negated()) {
              sat = true;
              break;
            }
          }
          if (!sat) {
            ok = false;
            break;
          }
        }
        if (ok) out.push_back(cand);
      }
    }
    return out;
  };

  std::vector<State> stack;
  for (std::size_t v = 0; v < seen.size(); ++v) {
    const State s = decode(v);
    if (sys.holds(sys.init(), s)) {
      seen[v] = true;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    const State s = stack.back();
    stack.pop_back();
    for (const State& t : next_states(s)) {
      const std::size_t v = index(t);
      if (seen[v]) continue;
      seen[v] = true;
      stack.push_back(t);
    }
  }
  return seen;
}

std::vector<bool> reaches_bad(const TransitionSystem& sys) {
  const Explorer ex(sys);
  const std::uint64_t n = ex.num_states();
  std::vector<std::vector<StateBits>> preds(n);
  for (StateBits s = 0; s < n; ++s)
    for (const auto& [in, t] : ex.successors(s)) preds[t].push_back(s);
  std::vector<bool> out(n, false);
  std::deque<StateBits> queue;
  for (StateBits s = 0; s < n; ++s)
    if (!ex.good(s)) {
      out[s] = true;
      queue.push_back(s);
    }
  while (!queue.empty()) {
    const StateBits t = queue.front();
    queue.pop_front();
    for (StateBits s : preds[t])
      if (!out[s]) {
        out[s] = true;
        queue.push_back(s);
      }
  }
  return out;
}

namespace {

// Successor lists of the F-states, shared by the subclause checks.
struct Frame {
  std::vector<StateBits> states;
  std::vector<std::vector<StateBits>> next;
  std::vector<StateBits> initial;
};

Frame explore(const Explorer& ex, const Cnf& f) {
  Frame fr;
  for (StateBits s = 0; s < ex.num_states(); ++s) {
    if (ex.initial(s)) fr.initial.push_back(s);
    if (!ex.satisfies(f, s)) continue;
    fr.states.push_back(s);
    std::vector<StateBits> succ;
    for (const auto& [in, t] : ex.successors(s)) succ.push_back(t);
    fr.next.push_back(std::move(succ));
  }
  return fr;
}

bool relatively_inductive(const Explorer& ex, const Frame& fr, const Clause& c) {
  for (StateBits s : fr.initial)
    if (!ex.satisfies(c, s)) return false;
  for (std::size_t i = 0; i < fr.states.size(); ++i) {
    if (!ex.satisfies(c, fr.states[i])) continue;
    for (StateBits t : fr.next[i])
      if (!ex.satisfies(c, t)) return false;
  }
  return true;
}

}  // namespace

bool check_relative_induction(const TransitionSystem& sys, const Cnf& f, const Clause& c) {
  const Explorer ex(sys);
  return relatively_inductive(ex, explore(ex, f), c);
}

bool minimality_check(const TransitionSystem& sys, const Cnf& f, const Clause& c) {
  if (c.size() > kMaxMinimalityClause)
    throw BudgetExceeded("oracle: clause of " + std::to_string(c.size()) + " literals exceeds the subclause budget");
  const Explorer ex(sys);
  const Frame fr = explore(ex, f);
  const std::uint64_t full = (std::uint64_t{1} << c.size()) - 1;
  for (std::uint64_t mask = 0; mask < full; ++mask) {
    std::vector<Lit> lits;
    for (std::size_t i = 0; i < c.size(); ++i)
      if ((mask >> i) & 1u) lits.push_back(c[i]);
    if (relatively_inductive(ex, fr, Clause(std::move(lits)))) return false;
  }
  return true;
}

}  // namespace relic::oracle
