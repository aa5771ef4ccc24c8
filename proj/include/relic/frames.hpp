#pragma once

// The over-approximation sequence F_0 = I, F_1, ..., F_{k+1} and every
// frame-relative SAT query the engine makes.
//
// Clauses are stored once, tagged with the highest level they belong to;
// clauses(F_i) is the set of clauses whose level is >= i. A single solver
// hosts all of them, each guarded by the activation literal of its level, so
// querying F_i means assuming act(i), act(i+1), ... . P and the literal
// invariants are permanent. I is guarded by its own activation literal and
// is assumed only for level 0 and initiation queries.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "relic/logic.hpp"
#include "relic/sat.hpp"

namespace relic {

/// A solver call was aborted by the interrupt callback.
class Interrupted : public std::runtime_error {
 public:
  Interrupted() : std::runtime_error("interrupted") {}
};

/// Predecessor extracted from a satisfying assignment: a full latch cube plus
/// the inputs of the transition out of it.
struct Witness {
  Cube state;
  InputVector inputs;
};

struct BadWitness {
  Cube state;
  InputVector inputs;
  /// Full latch cube of the primed (violating) state.
  Cube successor;
};

enum class QueryKind { Bad, RelativeInduction, Predecessor, Initiation, Intersects, Propagation };

/// One solver query as seen from outside: the frame level (0 means I), the
/// cube or clause it was about, and the answer.
///   Bad:               F_level /\ T /\ ~P'             (lits empty)
///   RelativeInduction: F_level /\ c /\ T /\ ~c'
///   Predecessor:       F_level /\ T /\ s'
///   Initiation:        I /\ ~c                         (level 0)
///   Intersects:        F_level /\ s
///   Propagation:       F_level /\ T /\ ~c'
struct QueryRecord {
  QueryKind kind;
  int level = 0;
  std::vector<Lit> lits;
  bool sat = false;
};

struct FrameOptions {
  std::uint64_t seed = 0;
  bool subsumption = true;
  std::function<bool()> interrupt;
  std::function<void(const QueryRecord&)> on_query;
};

class Frames {
 public:
  /// Precondition: I => P (the engine checks I /\ ~P first).
  explicit Frames(const TransitionSystem& sys, FrameOptions options = {});

  [[nodiscard]] const TransitionSystem& system() const { return *sys_; }

  /// F_level /\ T /\ ~P'.
  std::optional<BadWitness> query_bad(int level);
  /// F_i /\ ~s /\ T /\ s'.
  std::optional<Witness> consecution(int i, const Cube& s);
  /// F_n /\ T /\ s' without the ~s conjunct.
  std::optional<Witness> query_pred(int n, const Cube& s);
  /// I => c.
  bool initiation(const Clause& c);
  /// F_i /\ c /\ T /\ ~c'. Returns the predecessor of a counterexample to
  /// induction, or nullopt when c is inductive relative to F_i; then
  /// `reduced` (if given) receives the literals of c whose primed negation
  /// the unsatisfiable core used.
  std::optional<Cube> relative_induction(int i, const Clause& c, Clause* reduced = nullptr);
  /// Satisfiability of F_i /\ s (is s an F_i-state).
  bool intersects(int i, const Cube& s);

  /// Puts c into clauses(F_m) for 1 <= m <= j; with subsumption on, drops
  /// clauses at levels <= j that c subsumes.
  void add_clause_at(int j, const Clause& c);

  /// Moves each clause at level i (1 <= i <= k) to i+1 when F_i /\ T => c'.
  void propagate(int k);

  /// Least 1 <= i <= k with clauses(F_i) = clauses(F_{i+1}).
  [[nodiscard]] std::optional<int> syntactic_fixpoint(int k) const;

  /// clauses(F_i) for i >= 1; empty for i = 0.
  [[nodiscard]] std::vector<Clause> clauses(int i) const;
  /// Explicit formula: I for level 0, P /\ invariants /\ clauses(F_i) above.
  [[nodiscard]] Cnf formula(int i) const;
  /// Highest level c belongs to, or -1.
  [[nodiscard]] int level_of(const Clause& c) const;
  /// Highest level holding any clause (0 when empty).
  [[nodiscard]] int top_level() const;
  [[nodiscard]] std::size_t size() const { return level_.size(); }

  [[nodiscard]] std::uint64_t sat_calls() const { return sat_calls_; }
  [[nodiscard]] const sat::SolverStats& solver_stats() const { return ctx_->solver().stats(); }

  /// Debug dump, levels 1..k+1.
  void dump(std::ostream& out, int k) const;

 private:
  void build();
  void maybe_rebuild();
  std::vector<Lit> frame_assumptions(int level);
  sat::Status solve(const std::vector<Lit>& assumptions);
  void log(QueryKind kind, int level, std::span<const Lit> lits, bool sat) const;
  [[nodiscard]] Cube latch_cube() const;
  [[nodiscard]] Cube primed_cube() const;
  [[nodiscard]] InputVector input_values() const;

  const TransitionSystem* sys_;
  FrameOptions options_;
  std::unique_ptr<sat::SolverCtx> ctx_;
  Lit init_act_;
  Lit bad_act_;

  std::vector<std::vector<Clause>> delta_;  // delta_[i]: clauses whose level is exactly i
  std::unordered_map<Clause, int> level_;
  std::uint64_t sat_calls_ = 0;
  std::uint64_t rebuilds_ = 0;
};

}  // namespace relic
