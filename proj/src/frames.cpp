#include "relic/frames.hpp"

#include <algorithm>
#include <ostream>

namespace relic {

namespace {
// Retired guards leave dead variables behind; past this many the context is
// rebuilt from the stored clauses.
constexpr std::size_t kRebuildRetired = 20000;
}  // namespace

Frames::Frames(const TransitionSystem& sys, FrameOptions options)
    : sys_(&sys), options_(std::move(options)) {
  delta_.resize(2);
  build();
}

void Frames::build() {
  const TransitionSystem& sys = *sys_;
  ctx_ = std::make_unique<sat::SolverCtx>(sys.num_vars(), options_.seed + rebuilds_);
  for (const Clause& c : sys.trans()) ctx_->add_clause(c);
  for (const Clause& c : sys.property()) ctx_->add_clause(c);
  for (Lit l : sys.invariants()) ctx_->add_clause(Clause{l});

  init_act_ = ctx_->fresh_guard();
  for (const Clause& c : sys.init()) ctx_->add_guarded(c.lits(), init_act_);

  // bad_act => some property clause is false in the primed state
  bad_act_ = ctx_->fresh_guard();
  std::vector<Lit> any{~bad_act_};
  for (const Clause& c : sys.property()) {
    const Lit b = ctx_->fresh_guard();
    any.push_back(b);
    for (Lit l : c) ctx_->solver().add_clause({~b, ~sys.prime(l)});
  }
  ctx_->add_clause(Clause(any));

  for (std::size_t i = 1; i < delta_.size(); ++i)
    for (const Clause& c : delta_[i]) ctx_->add_guarded(c, static_cast<int>(i));
}

void Frames::maybe_rebuild() {
  if (ctx_->retired() < kRebuildRetired) return;
  ++rebuilds_;
  build();
}

std::vector<Lit> Frames::frame_assumptions(int level) {
  if (level == 0) return {init_act_};
  std::vector<Lit> out;
  const int top = std::max(level, static_cast<int>(delta_.size()) - 1);
  for (int j = level; j <= top; ++j) out.push_back(ctx_->activation_literal(j));
  return out;
}

sat::Status Frames::solve(const std::vector<Lit>& assumptions) {
  if (options_.interrupt && options_.interrupt()) throw Interrupted();
  ctx_->solver().set_interrupt(options_.interrupt);
  ++sat_calls_;
  const sat::Status st = ctx_->solve(assumptions);
  if (st == sat::Status::Unknown) throw Interrupted();
  return st;
}

void Frames::log(QueryKind kind, int level, std::span<const Lit> lits, bool sat) const {
  if (options_.on_query) options_.on_query(QueryRecord{kind, level, {lits.begin(), lits.end()}, sat});
}

Cube Frames::latch_cube() const {
  std::vector<Lit> lits;
  const sat::Solver& s = ctx_->solver();
  for (std::uint32_t i = 0; i < sys_->num_latches(); ++i) {
    const Var v = sys_->latch(i);
    lits.push_back(Lit(v, !s.model_value(v)));
  }
  return Cube(std::move(lits));
}

Cube Frames::primed_cube() const {
  std::vector<Lit> lits;
  const sat::Solver& s = ctx_->solver();
  for (std::uint32_t i = 0; i < sys_->num_latches(); ++i)
    lits.push_back(Lit(sys_->latch(i), !s.model_value(sys_->primed(i))));
  return Cube(std::move(lits));
}

InputVector Frames::input_values() const {
  InputVector out(sys_->num_inputs());
  for (std::uint32_t j = 0; j < sys_->num_inputs(); ++j)
    out[j] = ctx_->solver().model_value(sys_->input(j));
  return out;
}

std::optional<BadWitness> Frames::query_bad(int level) {
  std::vector<Lit> assume = frame_assumptions(level);
  assume.push_back(bad_act_);
  const bool sat = solve(assume) == sat::Status::Sat;
  log(QueryKind::Bad, level, {}, sat);
  if (!sat) return std::nullopt;
  return BadWitness{latch_cube(), input_values(), primed_cube()};
}

std::optional<Witness> Frames::consecution(int i, const Cube& s) {
  if (auto cti = relative_induction(i, negate(s))) return Witness{*cti, input_values()};
  return std::nullopt;
}

std::optional<Witness> Frames::query_pred(int n, const Cube& s) {
  std::vector<Lit> assume = frame_assumptions(n);
  for (Lit l : s) assume.push_back(sys_->prime(l));
  const bool sat = solve(assume) == sat::Status::Sat;
  log(QueryKind::Predecessor, n, s.lits(), sat);
  if (!sat) return std::nullopt;
  return Witness{latch_cube(), input_values()};
}

bool Frames::initiation(const Clause& c) {
  std::vector<Lit> assume{init_act_};
  for (Lit l : c) assume.push_back(~l);
  const bool sat = solve(assume) == sat::Status::Sat;
  log(QueryKind::Initiation, 0, c.lits(), sat);
  return !sat;
}

bool Frames::intersects(int i, const Cube& s) {
  std::vector<Lit> assume = frame_assumptions(i);
  assume.insert(assume.end(), s.begin(), s.end());
  const bool sat = solve(assume) == sat::Status::Sat;
  log(QueryKind::Intersects, i, s.lits(), sat);
  return sat;
}

std::optional<Cube> Frames::relative_induction(int i, const Clause& c, Clause* reduced) {
  maybe_rebuild();
  const Lit guard = ctx_->fresh_guard();
  ctx_->add_guarded(c.lits(), guard);
  std::vector<Lit> assume = frame_assumptions(i);
  assume.push_back(guard);
  const std::size_t first_primed = assume.size();
  for (Lit l : c) assume.push_back(~sys_->prime(l));

  sat::Status st;
  try {
    st = solve(assume);
  } catch (...) {
    ctx_->retire(guard);
    throw;
  }
  std::optional<Cube> cti;
  if (st == sat::Status::Sat) {
    cti = latch_cube();
  } else if (reduced) {
    std::vector<Lit> keep;
    for (std::size_t a = first_primed; a < assume.size(); ++a)
      if (ctx_->solver().in_core(assume[a])) keep.push_back(sys_->unprime(~assume[a]));
    *reduced = Clause(std::move(keep));
  }
  ctx_->retire(guard);
  log(QueryKind::RelativeInduction, i, c.lits(), cti.has_value());
  return cti;
}

void Frames::add_clause_at(int j, const Clause& c) {
  if (j < 1) throw StructuralError("clauses live at levels >= 1");
  if (static_cast<std::size_t>(j) >= delta_.size()) delta_.resize(static_cast<std::size_t>(j) + 1);

  auto it = level_.find(c);
  if (it != level_.end()) {
    if (it->second >= j) return;
    auto& old = delta_[static_cast<std::size_t>(it->second)];
    old.erase(std::find(old.begin(), old.end(), c));
  }

  if (options_.subsumption) {
    for (int m = 1; m <= j; ++m) {
      auto& d = delta_[static_cast<std::size_t>(m)];
      std::erase_if(d, [&](const Clause& other) {
        if (other == c || !subsumes(c, other)) return false;
        level_.erase(other);
        return true;
      });
    }
  }

  level_[c] = j;
  delta_[static_cast<std::size_t>(j)].push_back(c);
  ctx_->add_guarded(c, j);
}

void Frames::propagate(int k) {
  if (static_cast<std::size_t>(k) + 2 > delta_.size()) delta_.resize(static_cast<std::size_t>(k) + 2);
  for (int i = 1; i <= k; ++i) {
    const std::vector<Clause> here = delta_[static_cast<std::size_t>(i)];
    for (const Clause& c : here) {
      auto it = level_.find(c);
      if (it == level_.end() || it->second != i) continue;  // dropped by subsumption meanwhile
      std::vector<Lit> assume = frame_assumptions(i);
      for (Lit l : c) assume.push_back(~sys_->prime(l));
      const bool sat = solve(assume) == sat::Status::Sat;
      log(QueryKind::Propagation, i, c.lits(), sat);
      if (!sat) add_clause_at(i + 1, c);
    }
  }
}

std::optional<int> Frames::syntactic_fixpoint(int k) const {
  for (int i = 1; i <= k; ++i)
    if (static_cast<std::size_t>(i) >= delta_.size() || delta_[static_cast<std::size_t>(i)].empty())
      return i;
  return std::nullopt;
}

std::vector<Clause> Frames::clauses(int i) const {
  std::vector<Clause> out;
  if (i < 1) return out;
  for (std::size_t m = static_cast<std::size_t>(i); m < delta_.size(); ++m)
    out.insert(out.end(), delta_[m].begin(), delta_[m].end());
  std::sort(out.begin(), out.end());
  return out;
}

Cnf Frames::formula(int i) const {
  if (i == 0) return sys_->init();
  Cnf out = sys_->property();
  for (Lit l : sys_->invariants()) out.push_back(Clause{l});
  for (Clause& c : clauses(i)) out.push_back(std::move(c));
  return out;
}

int Frames::level_of(const Clause& c) const {
  auto it = level_.find(c);
  return it == level_.end() ? -1 : it->second;
}

int Frames::top_level() const {
  for (std::size_t m = delta_.size(); m-- > 1;)
    if (!delta_[m].empty()) return static_cast<int>(m);
  return 0;
}

void Frames::dump(std::ostream& out, int k) const {
  for (int i = 1; i <= k + 1; ++i) {
    out << "frame " << i << '\n';
    if (static_cast<std::size_t>(i) >= delta_.size()) continue;
    std::vector<Clause> here = delta_[static_cast<std::size_t>(i)];
    std::sort(here.begin(), here.end());
    for (const Clause& c : here) out << to_text(c) << '\n';
  }
}

}  // namespace relic
