#pragma once

// Incremental CDCL solver: two-watched-literal propagation, first-UIP
// learning, VSIDS branching with phase saving, Luby restarts, and solving
// under assumptions with final-conflict analysis.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "relic/logic.hpp"

namespace relic::sat {

enum class Status { Sat, Unsat, Unknown };

struct SolverStats {
  std::uint64_t solves = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
};

class Solver {
 public:
  explicit Solver(std::uint64_t seed = 0);

  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;
  Solver(Solver&&) = default;
  Solver& operator=(Solver&&) = default;

  Var new_var();
  /// Makes variables 1..n available.
  void ensure_vars(std::uint32_t n);
  [[nodiscard]] std::uint32_t num_vars() const { return num_vars_; }

  /// Adds a permanent clause. Returns false once the database is known to be
  /// unsatisfiable. Throws StructuralError for undeclared variables.
  bool add_clause(std::span<const Lit> lits);
  bool add_clause(const Clause& c) { return add_clause(c.lits()); }
  bool add_clause(std::initializer_list<Lit> lits) {
    return add_clause(std::span<const Lit>(lits.begin(), lits.size()));
  }

  Status solve(std::span<const Lit> assumptions = {});
  Status solve(std::initializer_list<Lit> assumptions) {
    return solve(std::span<const Lit>(assumptions.begin(), assumptions.size()));
  }

  /// Model of the last satisfiable call, total over declared variables.
  [[nodiscard]] bool model_value(Var v) const { return model_[v.index]; }
  [[nodiscard]] bool model_value(Lit l) const { return model_[l.var().index] != l.negated(); }
  [[nodiscard]] Assignment model() const;

  /// Assumption literals sufficient for unsatisfiability of the last
  /// unsatisfiable call (empty when the database alone is inconsistent).
  [[nodiscard]] const std::vector<Lit>& core() const { return core_; }
  [[nodiscard]] bool in_core(Lit assumption) const;

  /// Polled every few hundred conflicts; returning true aborts the call
  /// with Status::Unknown.
  void set_interrupt(std::function<bool()> interrupt) { interrupt_ = std::move(interrupt); }

  [[nodiscard]] bool okay() const { return ok_; }
  [[nodiscard]] const SolverStats& stats() const { return stats_; }
  [[nodiscard]] std::size_t num_clauses() const { return num_original_; }
  [[nodiscard]] std::size_t num_learnts() const { return learnts_.size(); }

 private:
  using CRef = std::uint32_t;
  static constexpr CRef kNoReason = 0xffffffffu;
  static constexpr std::uint8_t kTrue = 0;
  static constexpr std::uint8_t kFalse = 1;
  static constexpr std::uint8_t kUndef = 2;

  struct Watcher {
    CRef cref;
    Lit blocker;
  };

  // Arena layout per clause: [size<<1 | learnt] [activity bits] lits...
  [[nodiscard]] std::uint32_t csize(CRef c) const { return arena_[c] >> 1; }
  [[nodiscard]] bool clearnt(CRef c) const { return (arena_[c] & 1u) != 0; }
  [[nodiscard]] Lit* clits(CRef c) { return reinterpret_cast<Lit*>(&arena_[c + 2]); }
  [[nodiscard]] const Lit* clits(CRef c) const {
    return reinterpret_cast<const Lit*>(&arena_[c + 2]);
  }
  [[nodiscard]] float& cactivity(CRef c) { return *reinterpret_cast<float*>(&arena_[c + 1]); }

  CRef alloc_clause(std::span<const Lit> lits, bool learnt);
  void attach(CRef c);
  void detach(CRef c);
  void remove_clause(CRef c);
  [[nodiscard]] bool satisfied(CRef c) const;
  [[nodiscard]] bool locked(CRef c) const;

  [[nodiscard]] std::uint8_t value(Lit l) const {
    const std::uint8_t v = assigns_[l.var().index];
    return v == kUndef ? kUndef : static_cast<std::uint8_t>(v ^ (l.negated() ? 1u : 0u));
  }
  [[nodiscard]] int level(Var v) const { return level_[v.index]; }
  [[nodiscard]] int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit p, CRef from);
  CRef propagate();
  void analyze(CRef confl, std::vector<Lit>& out_learnt, int& out_btlevel);
  void analyze_final(Lit p);
  void cancel_until(int level);
  Lit pick_branch();
  Status search(std::int64_t conflict_budget);
  void reduce_db();
  void simplify();
  void garbage_collect();

  void var_bump(Var v);
  void var_decay() { var_inc_ /= var_decay_; }
  void clause_bump(CRef c);
  void clause_decay() { cla_inc_ /= cla_decay_; }

  // binary max-heap over variable activity
  void heap_insert(std::uint32_t v);
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  std::uint32_t heap_pop();
  [[nodiscard]] bool heap_contains(std::uint32_t v) const { return heap_pos_[v] >= 0; }

  std::uint32_t num_vars_ = 0;
  bool ok_ = true;

  std::vector<std::uint32_t> arena_;
  std::size_t wasted_ = 0;
  std::vector<CRef> clauses_;
  std::vector<CRef> learnts_;
  std::size_t num_original_ = 0;
  std::vector<std::vector<Watcher>> watches_;

  std::vector<std::uint8_t> assigns_;
  std::vector<std::uint8_t> polarity_;
  std::vector<int> level_;
  std::vector<CRef> reason_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  std::size_t simp_trail_ = 0;

  std::vector<double> activity_;
  double var_inc_ = 1.0;
  double var_decay_ = 0.95;
  double cla_inc_ = 1.0;
  double cla_decay_ = 0.999;
  std::vector<std::uint32_t> heap_;
  std::vector<int> heap_pos_;

  std::vector<std::uint8_t> seen_;
  std::vector<Lit> analyze_stack_;
  std::vector<Lit> assumptions_;
  std::vector<Lit> core_;
  std::vector<bool> model_;

  double max_learnts_ = 0;
  bool interrupted_ = false;
  bool seeded_ = false;
  std::mt19937_64 rng_;
  std::function<bool()> interrupt_;
  SolverStats stats_;
};

/// Solver wrapper with a registry of per-level activation literals. A clause
/// guarded at level j carries the extra literal ~act(j) and is active exactly
/// when act(j) is assumed.
class SolverCtx {
 public:
  explicit SolverCtx(std::uint32_t num_vars = 0, std::uint64_t seed = 0);

  [[nodiscard]] Solver& solver() { return solver_; }
  [[nodiscard]] const Solver& solver() const { return solver_; }

  /// Stable fresh literal per level (level >= 0).
  Lit activation_literal(int level);
  /// Fresh one-shot guard; retire() disables it permanently.
  Lit fresh_guard();
  void retire(Lit guard);

  bool add_clause(const Clause& c) { return solver_.add_clause(c); }
  bool add_guarded(std::span<const Lit> lits, Lit guard);
  bool add_guarded(const Clause& c, int level) {
    return add_guarded(c.lits(), activation_literal(level));
  }

  Status solve(std::span<const Lit> assumptions) { return solver_.solve(assumptions); }

  [[nodiscard]] std::size_t retired() const { return retired_; }

 private:
  Solver solver_;
  std::map<int, Lit> activation_;
  std::size_t retired_ = 0;
};

// DIMACS CNF for the standalone harness.
struct DimacsCnf {
  std::uint32_t num_vars = 0;
  std::vector<std::vector<Lit>> clauses;
};

/// Parses `p cnf V C` followed by zero-terminated clauses; `c` lines are
/// comments. Throws StructuralError on malformed input.
DimacsCnf read_dimacs(std::istream& in);
void write_dimacs(std::ostream& out, const DimacsCnf& cnf);

}  // namespace relic::sat
