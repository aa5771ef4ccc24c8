#pragma once

// Explicit-state ground truth for small systems. Successors come from
// simulating the system's netlist, or, for systems without one, from
// evaluating T on every candidate (s, i, s') triple; no SAT solving.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "relic/engine.hpp"
#include "relic/logic.hpp"

namespace relic::oracle {

/// latches + inputs above kBudget, or a clause too long for
/// minimality_check.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kBudget = 24;
inline constexpr std::size_t kMaxMinimalityClause = 16;

/// States as bit masks: bit i is latch i.
using StateBits = std::uint64_t;

class Explorer {
 public:
  explicit Explorer(const TransitionSystem& sys);

  [[nodiscard]] std::uint64_t num_states() const { return std::uint64_t{1} << sys_.num_latches(); }
  [[nodiscard]] bool initial(StateBits s) const;
  [[nodiscard]] bool good(StateBits s) const;
  [[nodiscard]] bool satisfies(const Cnf& f, StateBits s) const;
  [[nodiscard]] bool satisfies(const Clause& c, StateBits s) const;
  /// (input bits, successor) for every input valuation.
  [[nodiscard]] std::vector<std::pair<std::uint64_t, StateBits>> successors(StateBits s) const;

  [[nodiscard]] State to_state(StateBits s) const;
  [[nodiscard]] InputVector to_inputs(std::uint64_t in) const;
  [[nodiscard]] const TransitionSystem& system() const { return sys_; }

 private:
  const TransitionSystem& sys_;
};

struct Result {
  Outcome outcome = Outcome::Unknown;
  /// reachable[s] for every state (filled for Safe, and for Unsafe up to the
  /// BFS layer where the violation was found).
  std::vector<bool> reachable;
  /// Shortest counterexample when Unsafe.
  Trace trace;
};

Result bfs_verdict(const TransitionSystem& sys);

/// Exact reachable set as CNF: one clause excluding each unreachable state.
Cnf reachable_formula(const TransitionSystem& sys, const std::vector<bool>& reachable);

/// Independently coded depth-first enumeration of the reachable states.
std::vector<bool> reachable_dfs(const TransitionSystem& sys);

/// States from which some ~P-state is reachable (backward closure).
std::vector<bool> reaches_bad(const TransitionSystem& sys);

/// I => c, and every transition from an F /\ c state lands in c.
bool check_relative_induction(const TransitionSystem& sys, const Cnf& f, const Clause& c);

/// No strict subclause of c passes check_relative_induction.
bool minimality_check(const TransitionSystem& sys, const Cnf& f, const Clause& c);

}  // namespace relic::oracle
