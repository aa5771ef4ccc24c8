#pragma once

// Shared test fixtures: the seven-latch example built by hand, a
// seeded random AIG generator with an oracle-balanced suite builder, and
// brute-force helpers that avoid the library's own code paths.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "relic/aiger.hpp"
#include "relic/frames.hpp"
#include "relic/logic.hpp"
#include "relic/oracle.hpp"

namespace relic::testing {

// toy7 latch order: x0 x1 x y0 y1 y z
inline Lit x0(bool neg = false) { return Lit(Var{1}, neg); }
inline Lit x1(bool neg = false) { return Lit(Var{2}, neg); }
inline Lit xx(bool neg = false) { return Lit(Var{3}, neg); }
inline Lit y0(bool neg = false) { return Lit(Var{4}, neg); }
inline Lit y1(bool neg = false) { return Lit(Var{5}, neg); }
inline Lit yy(bool neg = false) { return Lit(Var{6}, neg); }
inline Lit zz(bool neg = false) { return Lit(Var{7}, neg); }

/// Clause-level transcription of the example: no inputs, no auxiliary
/// variables, no netlist.
TransitionSystem toy7();
/// x0 = ~x1 /\ x /\ y0 = ~y1 /\ y /\ z as CNF.
Cnf toy7_reachable();
/// Cube from a 7-character 0/1 string in latch order.
Cube toy7_state(const std::string& bits);

struct RandomShape {
  std::uint32_t min_latches = 2;
  std::uint32_t max_latches = 9;
  std::uint32_t max_inputs = 4;
  std::uint32_t min_gates = 3;
  std::uint32_t max_gates = 24;
  /// Percentage of latches left uninitialized.
  unsigned uninit_percent = 10;
};

/// Random AIG with one bad literal. Always structurally valid.
aiger::AigModel random_model(std::mt19937_64& rng, const RandomShape& shape = {});

struct RandomCase {
  std::uint64_t seed = 0;
  aiger::AigModel model;
  /// Full front-end pipeline (monitor, cone of influence, invariants).
  aiger::Prepared prepared;
  /// Monitor only; what the oracle explores.
  aiger::Prepared plain;
  oracle::Result truth;
};

/// `count` random cases, rejection-sampled so that each verdict makes up
/// between 40% and 60% of the suite.
std::vector<RandomCase> random_suite(std::size_t count, std::uint64_t seed, const RandomShape& shape = {});

/// Direct AIG simulation (independent of Netlist::step).
State simulate(const aiger::AigModel& m, const State& latches, const InputVector& inputs);

/// Truth-table satisfiability over variables 1..num_vars.
bool brute_sat(const Cnf& f, std::uint32_t num_vars);
bool brute_sat(const std::vector<std::vector<Lit>>& clauses, std::uint32_t num_vars);

/// Fresh-solver entailment a => b over the system's variables.
bool implies(const TransitionSystem& sys, const Cnf& a, const Cnf& b);

/// Answer to a logged frame query recomputed on a fresh solver loaded with
/// frames.formula(record.level), T and the query's own constraints.
bool fresh_query(const Frames& frames, const QueryRecord& record);

/// Greatest i in [lo, k] with ~s inductive relative to F_i (lo assumed
/// inductive), by linear scan with fresh solvers.
int fresh_linear_level(const Frames& frames, const Cube& s, int lo, int k);

std::string outcome_name(Outcome o);

}  // namespace relic::testing
