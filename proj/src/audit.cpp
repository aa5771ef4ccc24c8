// Debug-mode checks of the algorithm assertions. Every query runs on a fresh
// solver built from the explicit frame formulas, never on the frames' own
// context.

#include <set>

#include "relic/engine.hpp"

namespace relic {

namespace {

class Fresh {
 public:
  explicit Fresh(const TransitionSystem& sys) : sys_(sys) { s_.ensure_vars(sys.num_vars()); }

  Fresh& add(const Cnf& f) {
    for (const Clause& c : f) s_.add_clause(c);
    return *this;
  }
  Fresh& add_primed(const Cnf& f) {
    for (const Clause& c : f) s_.add_clause(sys_.prime(c));
    return *this;
  }
  Fresh& trans() { return add(sys_.trans()); }
  Fresh& cube(const Cube& s, bool primed = false) {
    for (Lit l : s) s_.add_clause({primed ? sys_.prime(l) : l});
    return *this;
  }
  Fresh& clause(const Clause& c, bool primed = false) {
    s_.add_clause(primed ? sys_.prime(c) : c);
    return *this;
  }
  /// Adds ~f (or ~f').
  Fresh& negation(const Cnf& f, bool primed = false) {
    std::vector<Lit> any;
    for (const Clause& c : f) {
      const Lit b(s_.new_var());
      any.push_back(b);
      for (Lit l : c) s_.add_clause({~b, primed ? ~sys_.prime(l) : ~l});
    }
    s_.add_clause(any);
    return *this;
  }
  Fresh& negation(const Clause& c, bool primed = false) {
    for (Lit l : c) s_.add_clause({primed ? ~sys_.prime(l) : ~l});
    return *this;
  }
  bool sat() { return s_.solve() == sat::Status::Sat; }

 private:
  const TransitionSystem& sys_;
  sat::Solver s_;
};

}  // namespace

// A.1 - A.5 at the head of prove's loop.
void Engine::audit_major(int k) {
  const TransitionSystem& sys = *sys_;
  const int top = frames_->top_level();
  for (int i = 0; i <= std::max(top, k + 1); ++i) {
    const Cnf fi = frames_->formula(i);
    expect(!Fresh(sys).add(sys.init()).negation(fi).sat(), "A.1", "I does not imply F_" + std::to_string(i));
    expect(!Fresh(sys).add(fi).negation(sys.property()).sat(), "A.2",
           "F_" + std::to_string(i) + " does not imply P");
  }
  for (int i = 1; i <= std::max(top, k); ++i) {
    const auto lower = frames_->clauses(i);
    const std::set<Clause> have(lower.begin(), lower.end());
    bool subset = true;
    for (const Clause& c : frames_->clauses(i + 1)) subset = subset && have.contains(c);
    expect(subset, "A.3", "clauses(F_" + std::to_string(i + 1) + ") not within clauses(F_" + std::to_string(i) + ")");
  }
  for (int i = 0; i < k; ++i)
    expect(!Fresh(sys).add(frames_->formula(i)).trans().negation(frames_->formula(i + 1), true).sat(), "A.4",
           "F_" + std::to_string(i) + " /\\ T does not imply F_" + std::to_string(i + 1) + "'");
  expect(top <= k, "A.5", "clauses above level k");
}

void Engine::audit_check_head(int k, const Cube& s) {
  const TransitionSystem& sys = *sys_;
  for (int i = 0; i <= k + 1; ++i) {
    const Cnf fi = frames_->formula(i);
    expect(!Fresh(sys).add(sys.init()).negation(fi).sat(), "B.1", "I does not imply F_" + std::to_string(i));
    expect(!Fresh(sys).add(fi).negation(sys.property()).sat(), "B.1", "F_i does not imply P");
  }
  for (int i = 0; i < k; ++i)
    expect(!Fresh(sys).add(frames_->formula(i)).trans().negation(frames_->formula(i + 1), true).sat(), "B.1",
           "F_i /\\ T does not imply F_{i+1}'");
  const Cnf fk = frames_->formula(k);
  for (const Clause& c : frames_->clauses(k + 1))
    expect(!Fresh(sys).add(fk).trans().negation(c, true).sat(), "B.2", "clause of F_{k+1} not implied by F_k /\\ T");
  expect(frames_->top_level() <= k + 1, "B.3", "clauses above level k+1");
  if (k >= 2) {
    const Clause ns = negate(s);
    expect(!Fresh(sys).add(sys.init()).cube(s).sat() &&
               !Fresh(sys).add(frames_->formula(k - 2)).clause(ns).trans().cube(s, true).sat(),
           "check.pre", "~s not inductive relative to F_{k-2}");
  }
}

void Engine::audit_check_tail(int k, const Cube& s) {
  expect(!Fresh(*sys_).add(frames_->formula(k)).cube(s).sat(), "C", "s still satisfies F_k");
}

void Engine::audit_push_head(int k, const std::map<Cube, int>& current, const std::map<Cube, int>& previous) {
  const TransitionSystem& sys = *sys_;
  for (const auto& [q, i] : previous) {
    auto it = current.find(q);
    expect(it != current.end() && it->second >= i, "D.2", "a queued state vanished or lost level");
  }
  for (const auto& [q, i] : current) {
    expect(i > 0 && i <= k + 1, "D.3", "obligation level out of range");
    expect(!Fresh(sys).add(frames_->formula(i)).cube(q).sat(), "D.4", "q satisfies F_i");
    expect(!Fresh(sys).add(sys.init()).cube(q).sat() &&
               !Fresh(sys).add(frames_->formula(i - 1)).clause(negate(q)).trans().cube(q, true).sat(),
           "D.5", "~q not inductive relative to F_{i-1}");
  }
}

void Engine::audit_predecessor(int n, const Cube& p) {
  if (n < 2) return;
  const TransitionSystem& sys = *sys_;
  expect(!Fresh(sys).add(sys.init()).cube(p).sat() &&
             !Fresh(sys).add(frames_->formula(n - 2)).clause(negate(p)).trans().cube(p, true).sat(),
         "E.2", "~p not inductive relative to F_{n-2}");
}

void Engine::audit_inductive(const Cube& s, int min, int k, int rv) {
  const TransitionSystem& sys = *sys_;
  expect(rv >= 0 && rv >= min && rv <= k, "inductive.post", "level out of range");
  const Clause ns = negate(s);
  auto inductive_at = [&](int j) {
    return !Fresh(sys).add(sys.init()).cube(s).sat() &&
           !Fresh(sys).add(frames_->formula(j)).clause(ns).trans().cube(s, true).sat();
  };
  expect(inductive_at(rv), "inductive.post", "~s not inductive relative to F_rv");
  if (rv < k) expect(!inductive_at(rv + 1), "inductive.greatest", "a higher level was also inductive");
}

void Engine::audit_generate(const Cube& s, int i, const Clause& c) {
  const TransitionSystem& sys = *sys_;
  const Clause ns = negate(s);
  bool sub = true;
  for (Lit l : c) sub = sub && ns.contains(l);
  expect(sub, "generate.subclause", "clause is not a subclause of ~s");
  expect(!Fresh(sys).add(sys.init()).negation(c).sat(), "generate.initiation", "I does not imply c");
  expect(!Fresh(sys).add(frames_->formula(i)).clause(c).trans().negation(c, true).sat(), "generate.consecution",
         "c not inductive relative to F_i");
}

void Engine::audit_generate_post(const Cube& s, int i) {
  expect(!Fresh(*sys_).add(frames_->formula(i + 1)).cube(s).sat(), "generate.post", "s still satisfies F_{i+1}");
}

void Engine::audit_fixpoint(int i) {
  const TransitionSystem& sys = *sys_;
  const Cnf fi = frames_->formula(i);
  expect(!Fresh(sys).add(sys.init()).negation(fi).sat(), "fixpoint.1", "I does not imply F_i");
  expect(!Fresh(sys).add(fi).trans().negation(fi, true).sat(), "fixpoint.2", "F_i not inductive");
  expect(!Fresh(sys).add(fi).negation(sys.property()).sat(), "fixpoint.3", "F_i does not imply P");
}

}  // namespace relic
