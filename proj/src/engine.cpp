#include "relic/engine.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <tuple>

#include "relic/certify.hpp"

namespace relic {

namespace {

double peak_memory_mb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return static_cast<double>(usage.ru_maxrss) / 1024.0;
}

// 2^n as a saturating count, for the rank annotations.
std::uint64_t pow2(std::uint32_t n) { return n >= 63 ? ~std::uint64_t{0} : std::uint64_t{1} << n; }

}  // namespace

Engine::Engine(const TransitionSystem& sys, EngineConfig cfg)
    : sys_(&sys),
      cfg_(std::move(cfg)),
      activity_(2 * (sys.num_latches() + 1), 0.0),
      rng_(cfg_.solver_seed) {
  if (cfg_.mic_threshold < 1) throw std::invalid_argument("mic_threshold must be at least 1");
  if (!(cfg_.ordering_decay > 0.0 && cfg_.ordering_decay < 1.0))
    throw std::invalid_argument("ordering_decay must lie in (0, 1)");
}

Engine::~Engine() = default;

Verdict Engine::prove() {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  Verdict v;
  std::uint64_t extra_calls = 0;
  try {
    // 0-step counterexample: I /\ ~P
    {
      sat::Solver s(cfg_.solver_seed);
      s.ensure_vars(sys_->num_vars());
      for (const Clause& c : sys_->init()) s.add_clause(c);
      std::vector<Lit> any;
      for (const Clause& c : sys_->property()) {
        const Lit b(s.new_var());
        any.push_back(b);
        for (Lit l : c) s.add_clause({~b, ~l});
      }
      s.add_clause(any);
      ++extra_calls;
      if (s.solve() == sat::Status::Sat) {
        State s0(sys_->num_latches());
        for (std::uint32_t i = 0; i < sys_->num_latches(); ++i) s0[i] = s.model_value(sys_->latch(i));
        v.outcome = Outcome::Unsafe;
        v.trace.states = {s0};
        v.trace.inputs = {InputVector(sys_->num_inputs(), false)};
      }
    }

    if (v.outcome != Outcome::Unsafe) {
      frames_ = std::make_unique<Frames>(
          *sys_, FrameOptions{cfg_.solver_seed, cfg_.subsumption, cfg_.interrupt, cfg_.on_query});
      // 1-step counterexample: I /\ T /\ ~P'
      if (auto w = frames_->query_bad(0)) {
        v.outcome = Outcome::Unsafe;
        v.trace = build_trace(std::vector<Cube>{w->state, w->successor});
      }
    }

    for (int k = 1; v.outcome == Outcome::Unknown; ++k) {
      k_ = k;
      stats_.k = k;
      if (observer_) observer_->on_major_iteration(*this, k);
      if (cfg_.check_invariants) {
        if (sys_->num_latches() < 63)
          expect(static_cast<std::uint64_t>(k) <= pow2(sys_->num_latches()) + 1, "rank.k",
                 "k = " + std::to_string(k));
        audit_major(k);
      }
      if (!check(k)) {
        v.outcome = Outcome::Unsafe;
        v.trace = std::move(trace_);
        break;
      }
      frames_->propagate(k);
      if (auto i = frames_->syntactic_fixpoint(k)) {
        if (cfg_.check_invariants) audit_fixpoint(*i);
        v.outcome = Outcome::Safe;
        v.proof_level = *i;
        for (Lit l : sys_->invariants()) v.strengthening.push_back(Clause{l});
        for (Clause& c : frames_->clauses(*i)) v.strengthening.push_back(std::move(c));
      }
    }
  } catch (const Interrupted&) {
    v = Verdict{};
  }

  stats_.sat_calls = extra_calls + (frames_ ? frames_->sat_calls() : 0);
  stats_.proof_clauses = v.outcome == Outcome::Safe ? v.strengthening.size() : 0;
  stats_.trace_length = v.outcome == Outcome::Unsafe ? v.trace.states.size() : 0;
  stats_.seconds = elapsed();
  stats_.peak_memory_mb = peak_memory_mb();

  if (cfg_.certify && v.outcome == Outcome::Safe && !certify::check_strengthening(*sys_, v.strengthening))
    throw InvariantViolation("certify", "strengthening fails the induction checks");
  if (cfg_.certify && v.outcome == Outcome::Unsafe && !certify::check_trace(*sys_, v.trace))
    throw InvariantViolation("certify", "counterexample does not replay");
  return v;
}

bool Engine::check(int k) {
  std::uint64_t iterations = 0;
  while (auto w = frames_->query_bad(k)) {
    ++stats_.check_iterations;
    ++iterations;
    if (cfg_.check_invariants && sys_->num_latches() < 63)
      expect(iterations <= pow2(sys_->num_latches()), "rank.check", "check loop exceeded 2^|x| iterations");
    nodes_.clear();
    nodes_.push_back(Obligation{w->state, -1, 0});
    bad_ = *w;
    const Cube s = w->state;
    if (observer_) observer_->on_check_iteration(*this, k, s);
    if (cfg_.check_invariants) audit_check_head(k, s);
    try {
      const int n = inductive(0, k - 2, k);
      nodes_[0].level = n + 1;
      push({0}, k);
    } catch (const CounterexampleFound& cex) {
      trace_ = build_trace(cex);
      return false;
    }
    if (cfg_.check_invariants) audit_check_tail(k, s);
  }
  return true;
}

int Engine::inductive(int node, int min, int k) {
  const Cube s = nodes_[static_cast<std::size_t>(node)].state;
  if (min < 0) {
    if (auto p = frames_->consecution(0, s)) throw CounterexampleFound{node, *p};
  }
  const int level = search_level(s, std::max(min, 0), k);
  if (observer_) observer_->on_inductive(*this, s, min, k, level);
  if (cfg_.check_invariants) audit_inductive(s, min, k, level);
  generate(s, level, k);
  return level;
}

int Engine::search_level(const Cube& s, int lo, int k) {
  if (cfg_.use_binary_search) {
    int hi = k;
    while (lo < hi) {
      const int mid = lo + (hi - lo + 1) / 2;
      if (frames_->consecution(mid, s)) hi = mid - 1;
      else lo = mid;
    }
    return lo;
  }
  for (int i = lo + 1; i <= k; ++i)
    if (frames_->consecution(i, s)) return i - 1;
  return k;
}

void Engine::generate(const Cube& s, int i, int k) {
  (void)k;
  bump(s);
  const Clause c = mic(s, i);
  ++stats_.generated_clauses;
  if (observer_) observer_->on_generate(*this, s, i, c);
  if (cfg_.check_invariants) audit_generate(s, i, c);
  frames_->add_clause_at(i + 1, c);
  if (cfg_.check_invariants) audit_generate_post(s, i);
}

Clause Engine::mic(const Cube& s, int i) {
  ++stats_.mic_calls;
  Clause c = negate(s);
  if (cfg_.core_shrinking) {
    Clause reduced;
    if (!frames_->relative_induction(i, c, &reduced) && reduced.size() < c.size() &&
        frames_->initiation(reduced))
      c = std::move(reduced);
  }
  int streak = 0;
  for (Lit l : drop_order(c)) {
    if (!c.contains(l)) continue;
    if (auto d = down(c.without(l), i)) {
      c = std::move(*d);
      streak = 0;
    } else if (++streak >= cfg_.mic_threshold) {
      break;
    }
  }
  return c;
}

// Shrinks d until it is inductive relative to F_i, dropping every literal a
// counterexample to induction satisfies. nullopt when d has no such subclause.
std::optional<Clause> Engine::down(Clause d, int i) {
  for (;;) {
    if (!frames_->initiation(d)) return std::nullopt;
    Clause reduced;
    auto cti = frames_->relative_induction(i, d, cfg_.core_shrinking ? &reduced : nullptr);
    if (!cti) {
      if (cfg_.core_shrinking && reduced.size() < d.size() && frames_->initiation(reduced)) return reduced;
      return d;
    }
    std::vector<Lit> keep;
    for (Lit l : d)
      if (cti->contains(~l)) keep.push_back(l);
    d = Clause(std::move(keep));
  }
}

std::vector<Lit> Engine::drop_order(const Clause& c) {
  std::vector<Lit> order(c.begin(), c.end());
  std::shuffle(order.begin(), order.end(), rng_);
  if (cfg_.use_literal_ordering)
    std::stable_sort(order.begin(), order.end(),
                     [&](Lit a, Lit b) { return activity_[a.code()] < activity_[b.code()]; });
  return order;
}

void Engine::bump(const Cube& s) {
  if (!cfg_.use_literal_ordering) return;
  for (Lit l : s) activity_[(~l).code()] += bump_inc_;
  bump_inc_ /= cfg_.ordering_decay;
  if (bump_inc_ > 1e100) {
    for (double& a : activity_) a *= 1e-100;
    bump_inc_ *= 1e-100;
  }
}

void Engine::push(std::vector<int> roots, int k) {
  // (level, FIFO sequence, node); cube -> node for the at-most-once check
  std::set<std::tuple<int, std::uint64_t, int>> queue;
  std::map<Cube, int> index;
  std::uint64_t seq = 0;
  auto enqueue = [&](int node) {
    queue.emplace(nodes_[static_cast<std::size_t>(node)].level, seq++, node);
    index[nodes_[static_cast<std::size_t>(node)].state] = node;
  };
  for (int r : roots) enqueue(r);

  std::map<Cube, int> previous;
  std::uint64_t iterations = 0;
  for (;;) {
    ++iterations;
    ++stats_.obligations;
    stats_.max_push_iterations = std::max(stats_.max_push_iterations, iterations);
    if (observer_ || cfg_.check_invariants) {
      std::vector<std::pair<int, Cube>> states;
      std::map<Cube, int> current;
      for (const auto& [level, order, node] : queue) {
        states.emplace_back(level, nodes_[static_cast<std::size_t>(node)].state);
        current[nodes_[static_cast<std::size_t>(node)].state] = level;
      }
      if (observer_) observer_->on_push_iteration(*this, k, states);
      if (cfg_.check_invariants) {
        if (sys_->num_latches() < 58)
          expect(iterations <= static_cast<std::uint64_t>(k + 1) * pow2(sys_->num_latches()), "rank.push",
                 "push exceeded (k+1)*2^|x| iterations");
        audit_push_head(k, current, previous);
      }
      previous = std::move(current);
    }

    const auto [n, order, node] = *queue.begin();
    if (n > k) return;
    const Cube s = nodes_[static_cast<std::size_t>(node)].state;
    if (auto p = frames_->query_pred(n, s)) {
      if (cfg_.check_invariants) {
        expect(p->state != s, "query.equiv", "F_n /\\ T /\\ s' witness equals s");
        expect(!index.contains(p->state), "E.1", "predecessor already queued");
        audit_predecessor(n, p->state);
      }
      nodes_.push_back(Obligation{p->state, node, 0});
      const int fresh = static_cast<int>(nodes_.size()) - 1;
      const int m = inductive(fresh, n - 2, k);
      nodes_[static_cast<std::size_t>(fresh)].level = m + 1;
      enqueue(fresh);
    } else {
      const int m = inductive(node, n, k);
      if (cfg_.check_invariants) expect(m + 1 > n, "F", "obligation level did not increase");
      queue.erase(queue.begin());
      nodes_[static_cast<std::size_t>(node)].level = m + 1;
      enqueue(node);
    }
  }
}

Trace Engine::build_trace(const CounterexampleFound& cex) {
  std::vector<Cube> states{cex.initial.state};
  for (int node = cex.node; node != -1; node = nodes_[static_cast<std::size_t>(node)].successor) {
    if (states.size() > nodes_.size() + 1) throw InvariantViolation("trace", "cyclic obligation chain");
    states.push_back(nodes_[static_cast<std::size_t>(node)].state);
  }
  states.push_back(bad_.successor);
  return build_trace(states);
}

// Concrete inputs for every gap, from a solver holding T only.
Trace Engine::build_trace(const std::vector<Cube>& states) {
  Trace t;
  sat::Solver s(cfg_.solver_seed);
  s.ensure_vars(sys_->num_vars());
  for (const Clause& c : sys_->trans()) s.add_clause(c);
  for (std::size_t i = 0; i < states.size(); ++i) {
    t.states.push_back(sys_->state_of(states[i]));
    InputVector in(sys_->num_inputs(), false);
    if (i + 1 < states.size()) {
      std::vector<Lit> assume(states[i].begin(), states[i].end());
      for (Lit l : states[i + 1]) assume.push_back(sys_->prime(l));
      if (s.solve(assume) != sat::Status::Sat)
        throw InvariantViolation("trace", "no transition between consecutive trace states");
      for (std::uint32_t j = 0; j < sys_->num_inputs(); ++j) in[j] = s.model_value(sys_->input(j));
    }
    t.inputs.push_back(std::move(in));
  }
  return t;
}

void Engine::expect(bool ok, const char* label, const std::string& detail) {
  ++checked_[label];
  ++stats_.invariant_checks;
  if (!ok) throw InvariantViolation(label, detail);
}

Verdict prove(const TransitionSystem& sys, const EngineConfig& cfg, EngineStats* stats) {
  Engine e(sys, cfg);
  Verdict v = e.prove();
  if (stats) *stats = e.stats();
  return v;
}

}  // namespace relic
