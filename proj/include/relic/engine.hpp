#pragma once

// prove / check / propagate / inductive / generate / push over a Frames
// sequence, with MIC-based generalization.

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "relic/frames.hpp"
#include "relic/logic.hpp"

namespace relic {

/// A debug-mode assertion on the algorithm state failed. `label` names it
/// ("A.4", "D.5", ...).
class InvariantViolation : public std::logic_error {
 public:
  InvariantViolation(std::string label, const std::string& detail)
      : std::logic_error(label + ": " + detail), label_(std::move(label)) {}
  [[nodiscard]] const std::string& label() const { return label_; }

 private:
  std::string label_;
};

struct EngineConfig {
  static constexpr int kUnbounded = std::numeric_limits<int>::max();

  /// Consecutive necessary literals after which MIC stops; kUnbounded gives
  /// a minimal clause.
  int mic_threshold = 3;
  bool use_binary_search = true;
  bool use_literal_ordering = true;
  double ordering_decay = 0.99;
  std::uint64_t solver_seed = 0;
  bool subsumption = true;
  /// Shrink relatively inductive candidates with the unsatisfiable core.
  bool core_shrinking = true;
  /// Check the algorithm assertions with fresh solvers at every loop head.
  bool check_invariants = false;
  /// Run certify on the verdict before returning it.
  bool certify = true;
  /// Polled at SAT-call boundaries; true aborts with Outcome::Unknown.
  std::function<bool()> interrupt;
  /// Passed through to Frames: sees every frame query.
  std::function<void(const QueryRecord&)> on_query;
};

/// Counterexample: states s_0..s_n with s_0 |= I and s_n |/= P. inputs[i]
/// drives the step from s_i to s_{i+1}; the last entry is unused.
struct Trace {
  std::vector<State> states;
  std::vector<InputVector> inputs;
};

enum class Outcome { Safe, Unsafe, Unknown };

struct Verdict {
  Outcome outcome = Outcome::Unknown;
  /// Safe: F with F /\ P inductive (frame clauses plus literal invariants).
  Cnf strengthening;
  /// Safe: level i whose clauses form the strengthening.
  int proof_level = 0;
  Trace trace;
};

struct EngineStats {
  std::uint64_t sat_calls = 0;
  std::uint64_t check_iterations = 0;
  std::uint64_t obligations = 0;
  std::uint64_t max_push_iterations = 0;
  std::uint64_t mic_calls = 0;
  std::uint64_t generated_clauses = 0;
  std::uint64_t invariant_checks = 0;
  std::size_t proof_clauses = 0;
  std::size_t trace_length = 0;
  int k = 0;
  double seconds = 0;
  double peak_memory_mb = 0;
};

class Engine;

/// Test hooks. All default to no-ops; the frames passed in are the live
/// sequence and must not be modified.
class EngineObserver {
 public:
  virtual ~EngineObserver() = default;
  /// Head of prove's loop, before check(k).
  virtual void on_major_iteration(const Engine&, int /*k*/) {}
  /// Head of check's loop, with the bad predecessor just extracted.
  virtual void on_check_iteration(const Engine&, int /*k*/, const Cube& /*s*/) {}
  /// Head of push's loop with the queued (level, state) pairs.
  virtual void on_push_iteration(const Engine&, int /*k*/,
                                 const std::vector<std::pair<int, Cube>>& /*states*/) {}
  /// inductive(s, min, k) is about to generate at `level`.
  virtual void on_inductive(const Engine&, const Cube& /*s*/, int /*min*/, int /*k*/, int /*level*/) {}
  /// generate produced c, inductive relative to F_i.
  virtual void on_generate(const Engine&, const Cube& /*s*/, int /*i*/, const Clause& /*c*/) {}
};

class Engine {
 public:
  Engine(const TransitionSystem& sys, EngineConfig cfg = {});
  ~Engine();

  Verdict prove();

  void set_observer(EngineObserver* observer) { observer_ = observer; }

  [[nodiscard]] const TransitionSystem& system() const { return *sys_; }
  [[nodiscard]] const Frames& frames() const { return *frames_; }
  [[nodiscard]] const EngineConfig& config() const { return cfg_; }
  [[nodiscard]] const EngineStats& stats() const { return stats_; }
  [[nodiscard]] int k() const { return k_; }
  /// Label -> number of times it was checked (debug mode only).
  [[nodiscard]] const std::map<std::string, std::uint64_t>& checked() const { return checked_; }

 private:
  struct Obligation {
    Cube state;
    int successor = -1;  // node index, -1 for the bad predecessor itself
    int level = 0;
  };
  struct CounterexampleFound {
    int node;
    Witness initial;
  };

  bool check(int k);
  int inductive(int node, int min, int k);
  int search_level(const Cube& s, int lo, int k);
  void generate(const Cube& s, int i, int k);
  Clause mic(const Cube& s, int i);
  std::optional<Clause> down(Clause c, int i);
  void push(std::vector<int> roots, int k);
  std::vector<Lit> drop_order(const Clause& c);
  void bump(const Cube& s);
  Trace build_trace(const CounterexampleFound& cex);
  Trace build_trace(const std::vector<Cube>& states);

  // debug-mode audits, see audit.cpp
  void audit_major(int k);
  void audit_check_head(int k, const Cube& s);
  void audit_check_tail(int k, const Cube& s);
  void audit_push_head(int k, const std::map<Cube, int>& current, const std::map<Cube, int>& previous);
  void audit_predecessor(int n, const Cube& p);
  void audit_generate(const Cube& s, int i, const Clause& c);
  void audit_generate_post(const Cube& s, int i);
  void audit_inductive(const Cube& s, int min, int k, int rv);
  void audit_fixpoint(int i);
  void expect(bool ok, const char* label, const std::string& detail);

  const TransitionSystem* sys_;
  EngineConfig cfg_;
  std::unique_ptr<Frames> frames_;
  EngineObserver* observer_ = nullptr;

  std::vector<Obligation> nodes_;
  BadWitness bad_;
  Trace trace_;
  int k_ = 0;
  std::vector<double> activity_;  // per literal code
  double bump_inc_ = 1.0;
  std::mt19937_64 rng_;
  EngineStats stats_;
  std::map<std::string, std::uint64_t> checked_;
};

/// Convenience wrapper.
Verdict prove(const TransitionSystem& sys, const EngineConfig& cfg = {}, EngineStats* stats = nullptr);

}  // namespace relic
