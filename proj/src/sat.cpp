#include "relic/sat.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace relic::sat {

namespace {

double luby(double y, int x) {
  int size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

constexpr int kRestartUnit = 100;

}  // namespace

Solver::Solver(std::uint64_t seed)
    : watches_(2),
      assigns_{kUndef},
      polarity_{1},
      level_{0},
      reason_{kNoReason},
      activity_{0.0},
      heap_pos_{-1},
      seen_{0},
      model_{false},
      seeded_(seed != 0),
      rng_(seed) {}

Var Solver::new_var() {
  const std::uint32_t v = ++num_vars_;
  assigns_.push_back(kUndef);
  // seeded solvers start from a random phase
  polarity_.push_back(seeded_ ? static_cast<std::uint8_t>(rng_() & 1u) : 1);
  level_.push_back(0);
  reason_.push_back(kNoReason);
  activity_.push_back(0.0);
  heap_pos_.push_back(-1);
  seen_.push_back(0);
  model_.push_back(false);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return Var{v};
}

void Solver::ensure_vars(std::uint32_t n) {
  while (num_vars_ < n) new_var();
}

Assignment Solver::model() const {
  Assignment out(num_vars_);
  for (std::uint32_t v = 1; v <= num_vars_; ++v) out.set(Var{v}, model_[v]);
  return out;
}

bool Solver::in_core(Lit assumption) const {
  return std::find(core_.begin(), core_.end(), assumption) != core_.end();
}

Solver::CRef Solver::alloc_clause(std::span<const Lit> lits, bool learnt) {
  const auto cref = static_cast<CRef>(arena_.size());
  arena_.push_back((static_cast<std::uint32_t>(lits.size()) << 1) | (learnt ? 1u : 0u));
  arena_.push_back(0);
  for (Lit l : lits) arena_.push_back(l.code());
  cactivity(cref) = 0.0f;
  return cref;
}

void Solver::attach(CRef c) {
  const Lit* lits = clits(c);
  watches_[(~lits[0]).code()].push_back({c, lits[1]});
  watches_[(~lits[1]).code()].push_back({c, lits[0]});
}

void Solver::detach(CRef c) {
  const Lit* lits = clits(c);
  for (int k = 0; k < 2; ++k) {
    auto& ws = watches_[(~lits[k]).code()];
    for (std::size_t i = 0; i < ws.size(); ++i)
      if (ws[i].cref == c) {
        ws[i] = ws.back();
        ws.pop_back();
        break;
      }
  }
}

bool Solver::satisfied(CRef c) const {
  const Lit* lits = clits(c);
  for (std::uint32_t i = 0; i < csize(c); ++i)
    if (value(lits[i]) == kTrue) return true;
  return false;
}

bool Solver::locked(CRef c) const {
  const Lit first = clits(c)[0];
  return reason_[first.var().index] == c && value(first) == kTrue;
}

void Solver::remove_clause(CRef c) {
  detach(c);
  if (locked(c)) reason_[clits(c)[0].var().index] = kNoReason;
  wasted_ += csize(c) + 2;
}

bool Solver::add_clause(std::span<const Lit> lits) {
  for (Lit l : lits)
    if (l.var().index == 0 || l.var().index > num_vars_)
      throw StructuralError("clause literal " + std::to_string(l.to_dimacs()) +
                            " outside declared variable range");
  if (!ok_) return false;
  cancel_until(0);

  std::vector<Lit> ps(lits.begin(), lits.end());
  std::sort(ps.begin(), ps.end());
  std::size_t j = 0;
  Lit prev;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Lit l = ps[i];
    if (value(l) == kTrue || (j > 0 && l == ~prev)) return true;
    if (value(l) == kFalse || (j > 0 && l == prev)) continue;
    ps[j++] = prev = l;
  }
  ps.resize(j);

  if (ps.empty()) {
    ok_ = false;
    return false;
  }
  if (ps.size() == 1) {
    enqueue(ps[0], kNoReason);
    ok_ = propagate() == kNoReason;
    return ok_;
  }
  const CRef c = alloc_clause(ps, false);
  clauses_.push_back(c);
  ++num_original_;
  attach(c);
  return true;
}

void Solver::enqueue(Lit p, CRef from) {
  const std::uint32_t v = p.var().index;
  assigns_[v] = p.negated() ? kFalse : kTrue;
  level_[v] = decision_level();
  reason_[v] = from;
  trail_.push_back(p);
}

Solver::CRef Solver::propagate() {
  CRef confl = kNoReason;
  while (qhead_ < trail_.size()) {
    const Lit p = trail_[qhead_++];
    auto& ws = watches_[p.code()];
    const Lit false_lit = ~p;
    ++stats_.propagations;

    std::size_t i = 0;
    std::size_t j = 0;
    const std::size_t n = ws.size();
    while (i < n) {
      const Watcher w = ws[i];
      if (value(w.blocker) == kTrue) {
        ws[j++] = ws[i++];
        continue;
      }
      const CRef cr = w.cref;
      Lit* c = clits(cr);
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      ++i;

      const Lit first = c[0];
      const Watcher nw{cr, first};
      if (first != w.blocker && value(first) == kTrue) {
        ws[j++] = nw;
        continue;
      }

      bool moved = false;
      const std::uint32_t sz = csize(cr);
      for (std::uint32_t k = 2; k < sz; ++k) {
        if (value(c[k]) != kFalse) {
          c[1] = c[k];
          c[k] = false_lit;
          watches_[(~c[1]).code()].push_back(nw);
          moved = true;
          break;
        }
      }
      if (moved) continue;

      ws[j++] = nw;
      if (value(first) == kFalse) {
        confl = cr;
        qhead_ = trail_.size();
        while (i < n) ws[j++] = ws[i++];
      } else {
        enqueue(first, cr);
      }
    }
    ws.resize(j);
  }
  return confl;
}

void Solver::analyze(CRef confl, std::vector<Lit>& out_learnt, int& out_btlevel) {
  int path_count = 0;
  Lit p;
  bool first = true;
  out_learnt.clear();
  out_learnt.push_back(Lit());
  auto index = static_cast<std::ptrdiff_t>(trail_.size()) - 1;

  do {
    if (clearnt(confl)) clause_bump(confl);
    const Lit* c = clits(confl);
    const std::uint32_t sz = csize(confl);
    for (std::uint32_t j = first ? 0 : 1; j < sz; ++j) {
      const Lit q = c[j];
      const std::uint32_t v = q.var().index;
      if (!seen_[v] && level_[v] > 0) {
        var_bump(q.var());
        seen_[v] = 1;
        if (level_[v] >= decision_level())
          ++path_count;
        else
          out_learnt.push_back(q);
      }
    }
    first = false;
    while (!seen_[trail_[static_cast<std::size_t>(index--)].var().index]) {
    }
    p = trail_[static_cast<std::size_t>(index + 1)];
    confl = reason_[p.var().index];
    seen_[p.var().index] = 0;
    --path_count;
  } while (path_count > 0);
  out_learnt[0] = ~p;

  // drop literals implied by the rest of the clause through their reason
  analyze_stack_.assign(out_learnt.begin(), out_learnt.end());
  std::size_t j = 1;
  for (std::size_t i = 1; i < out_learnt.size(); ++i) {
    const CRef r = reason_[out_learnt[i].var().index];
    if (r == kNoReason) {
      out_learnt[j++] = out_learnt[i];
      continue;
    }
    const Lit* c = clits(r);
    for (std::uint32_t k = 1; k < csize(r); ++k) {
      const std::uint32_t v = c[k].var().index;
      if (!seen_[v] && level_[v] > 0) {
        out_learnt[j++] = out_learnt[i];
        break;
      }
    }
  }
  out_learnt.resize(j);

  if (out_learnt.size() == 1) {
    out_btlevel = 0;
  } else {
    std::size_t max_i = 1;
    for (std::size_t i = 2; i < out_learnt.size(); ++i)
      if (level_[out_learnt[i].var().index] > level_[out_learnt[max_i].var().index]) max_i = i;
    std::swap(out_learnt[1], out_learnt[max_i]);
    out_btlevel = level_[out_learnt[1].var().index];
  }
  for (Lit l : analyze_stack_) seen_[l.var().index] = 0;
}

void Solver::analyze_final(Lit failed) {
  core_.clear();
  core_.push_back(failed);
  if (decision_level() == 0) return;
  seen_[failed.var().index] = 1;
  for (auto i = static_cast<std::ptrdiff_t>(trail_.size()) - 1;
       i >= static_cast<std::ptrdiff_t>(trail_lim_[0]); --i) {
    const Lit t = trail_[static_cast<std::size_t>(i)];
    const std::uint32_t x = t.var().index;
    if (!seen_[x]) continue;
    const CRef r = reason_[x];
    if (r == kNoReason) {
      core_.push_back(t);
    } else {
      const Lit* c = clits(r);
      for (std::uint32_t k = 1; k < csize(r); ++k)
        if (level_[c[k].var().index] > 0) seen_[c[k].var().index] = 1;
    }
    seen_[x] = 0;
  }
  seen_[failed.var().index] = 0;
}

void Solver::cancel_until(int lvl) {
  if (decision_level() <= lvl) return;
  for (auto c = static_cast<std::ptrdiff_t>(trail_.size()) - 1;
       c >= static_cast<std::ptrdiff_t>(trail_lim_[static_cast<std::size_t>(lvl)]); --c) {
    const Lit l = trail_[static_cast<std::size_t>(c)];
    const std::uint32_t v = l.var().index;
    assigns_[v] = kUndef;
    polarity_[v] = l.negated() ? 1 : 0;
    reason_[v] = kNoReason;
    if (!heap_contains(v)) heap_insert(v);
  }
  qhead_ = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(lvl)]);
  trail_.resize(qhead_);
  trail_lim_.resize(static_cast<std::size_t>(lvl));
}

Lit Solver::pick_branch() {
  while (!heap_.empty()) {
    const std::uint32_t v = heap_pop();
    if (assigns_[v] == kUndef) {
      ++stats_.decisions;
      return Lit(Var{v}, polarity_[v] != 0);
    }
  }
  return Lit();
}

void Solver::reduce_db() {
  std::sort(learnts_.begin(), learnts_.end(), [&](CRef a, CRef b) {
    const bool a_bin = csize(a) == 2;
    const bool b_bin = csize(b) == 2;
    if (a_bin != b_bin) return b_bin;
    return cactivity(a) < cactivity(b);
  });
  const double extra_lim = cla_inc_ / static_cast<double>(std::max<std::size_t>(learnts_.size(), 1));
  std::size_t j = 0;
  for (std::size_t i = 0; i < learnts_.size(); ++i) {
    const CRef c = learnts_[i];
    if (csize(c) > 2 && !locked(c) &&
        (i < learnts_.size() / 2 || cactivity(c) < extra_lim)) {
      remove_clause(c);
    } else {
      learnts_[j++] = c;
    }
  }
  learnts_.resize(j);
}

void Solver::simplify() {
  if (propagate() != kNoReason) {
    ok_ = false;
    return;
  }
  auto sweep = [&](std::vector<CRef>& list, bool original) {
    std::size_t j = 0;
    for (CRef c : list) {
      if (satisfied(c)) {
        remove_clause(c);
        if (original) --num_original_;
      } else {
        list[j++] = c;
      }
    }
    list.resize(j);
  };
  sweep(learnts_, false);
  sweep(clauses_, true);
  simp_trail_ = trail_.size();
  if (wasted_ > arena_.size() / 2) garbage_collect();
}

void Solver::garbage_collect() {
  // only called at decision level 0, where reasons are never consulted
  std::vector<std::uint32_t> fresh;
  fresh.reserve(arena_.size() - wasted_);
  auto move = [&](std::vector<CRef>& list) {
    for (CRef& c : list) {
      const auto nc = static_cast<CRef>(fresh.size());
      fresh.insert(fresh.end(), arena_.begin() + c, arena_.begin() + c + 2 + csize(c));
      c = nc;
    }
  };
  move(clauses_);
  move(learnts_);
  arena_.swap(fresh);
  wasted_ = 0;
  for (auto& ws : watches_) ws.clear();
  for (CRef c : clauses_) attach(c);
  for (CRef c : learnts_) attach(c);
  for (Lit l : trail_) reason_[l.var().index] = kNoReason;
}

void Solver::var_bump(Var v) {
  if ((activity_[v.index] += var_inc_) > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_contains(v.index)) heap_up(static_cast<std::size_t>(heap_pos_[v.index]));
}

void Solver::clause_bump(CRef c) {
  if ((cactivity(c) += static_cast<float>(cla_inc_)) > 1e20f) {
    for (CRef l : learnts_) cactivity(l) *= 1e-20f;
    cla_inc_ *= 1e-20;
  }
}

void Solver::heap_insert(std::uint32_t v) {
  heap_pos_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

void Solver::heap_up(std::size_t i) {
  const std::uint32_t v = heap_[i];
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (activity_[heap_[parent]] >= activity_[v]) break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

void Solver::heap_down(std::size_t i) {
  const std::uint32_t v = heap_[i];
  const std::size_t n = heap_.size();
  while (2 * i + 1 < n) {
    std::size_t child = 2 * i + 1;
    if (child + 1 < n && activity_[heap_[child + 1]] > activity_[heap_[child]]) ++child;
    if (activity_[heap_[child]] <= activity_[v]) break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

std::uint32_t Solver::heap_pop() {
  const std::uint32_t top = heap_[0];
  heap_pos_[top] = -1;
  const std::uint32_t last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_down(0);
  }
  return top;
}

Status Solver::search(std::int64_t conflict_budget) {
  std::int64_t conflicts_here = 0;
  std::vector<Lit> learnt;
  for (;;) {
    const CRef confl = propagate();
    if (confl != kNoReason) {
      ++stats_.conflicts;
      ++conflicts_here;
      if (decision_level() == 0) {
        ok_ = false;
        return Status::Unsat;
      }
      int bt = 0;
      analyze(confl, learnt, bt);
      cancel_until(bt);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        const CRef c = alloc_clause(learnt, true);
        learnts_.push_back(c);
        attach(c);
        clause_bump(c);
        enqueue(learnt[0], c);
      }
      var_decay();
      clause_decay();
      if (interrupt_ && stats_.conflicts % 256 == 0 && interrupt_()) {
        interrupted_ = true;
        cancel_until(0);
        return Status::Unknown;
      }
      continue;
    }

    if (conflicts_here >= conflict_budget) {
      cancel_until(0);
      return Status::Unknown;
    }
    if (decision_level() == 0 && trail_.size() > simp_trail_) {
      simplify();
      if (!ok_) return Status::Unsat;
    }
    if (static_cast<double>(learnts_.size()) - static_cast<double>(trail_.size()) >= max_learnts_)
      reduce_db();

    Lit next;
    while (static_cast<std::size_t>(decision_level()) < assumptions_.size()) {
      const Lit a = assumptions_[static_cast<std::size_t>(decision_level())];
      if (value(a) == kTrue) {
        trail_lim_.push_back(static_cast<int>(trail_.size()));
      } else if (value(a) == kFalse) {
        analyze_final(a);
        return Status::Unsat;
      } else {
        next = a;
        break;
      }
    }
    if (next.var().index == 0) {
      next = pick_branch();
      if (next.var().index == 0) return Status::Sat;
    }
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(next, kNoReason);
  }
}

Status Solver::solve(std::span<const Lit> assumptions) {
  core_.clear();
  ++stats_.solves;
  for (Lit a : assumptions)
    if (a.var().index == 0 || a.var().index > num_vars_)
      throw StructuralError("assumption outside declared variable range");
  if (!ok_) return Status::Unsat;

  assumptions_.assign(assumptions.begin(), assumptions.end());
  if (max_learnts_ == 0)
    max_learnts_ = std::max(2000.0, static_cast<double>(num_original_) / 3.0);
  interrupted_ = false;

  Status status = Status::Unknown;
  int restarts = 0;
  while (status == Status::Unknown) {
    status = search(static_cast<std::int64_t>(luby(2.0, restarts) * kRestartUnit));
    if (interrupted_) break;
    ++restarts;
    ++stats_.restarts;
    max_learnts_ *= 1.02;
  }

  if (status == Status::Sat) {
    for (std::uint32_t v = 1; v <= num_vars_; ++v) model_[v] = assigns_[v] == kTrue;
  }
  cancel_until(0);
  return status;
}

SolverCtx::SolverCtx(std::uint32_t num_vars, std::uint64_t seed) : solver_(seed) {
  solver_.ensure_vars(num_vars);
}

Lit SolverCtx::activation_literal(int level) {
  if (level < 0) throw StructuralError("activation level must be non-negative");
  auto it = activation_.find(level);
  if (it != activation_.end()) return it->second;
  const Lit act(solver_.new_var());
  activation_.emplace(level, act);
  return act;
}

Lit SolverCtx::fresh_guard() { return Lit(solver_.new_var()); }

void SolverCtx::retire(Lit guard) {
  solver_.add_clause({~guard});
  ++retired_;
}

bool SolverCtx::add_guarded(std::span<const Lit> lits, Lit guard) {
  std::vector<Lit> out(lits.begin(), lits.end());
  out.push_back(~guard);
  return solver_.add_clause(out);
}

}  // namespace relic::sat
