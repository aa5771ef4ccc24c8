#pragma once

// Proof and trace certificates: text formats, independent checkers, and
// conversion of traces to the AIGER witness format.
//
// Proof file:
//   relic-proof 1
//   hash 0123456789abcdef
//   latches 7
//   k 2
//   property 1
//   7
//   clauses 3
//   1 3
//   -1 -2
//   ...
//
// Trace file (one line per state: latch bits, a space, input bits; `-`
// stands for an empty bit string):
//   relic-trace 1
//   hash 0123456789abcdef
//   latches 3 inputs 1
//   steps 2
//   100 1
//   010 -

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "relic/aiger.hpp"
#include "relic/engine.hpp"
#include "relic/logic.hpp"

namespace relic::certify {

class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProofFile {
  std::uint64_t system_hash = 0;
  std::uint32_t latches = 0;
  int k = 0;
  Cnf property;
  Cnf clauses;
};

struct TraceFile {
  std::uint64_t system_hash = 0;
  std::uint32_t latches = 0;
  std::uint32_t inputs = 0;
  Trace trace;
};

ProofFile make_proof(const TransitionSystem& sys, const Verdict& v, int k);
std::string write_proof(const ProofFile& p);
/// Throws CertificateError on malformed input.
ProofFile parse_proof(std::string_view text);

TraceFile make_trace(const TransitionSystem& sys, const Trace& t);
std::string write_trace(const TraceFile& t);
TraceFile parse_trace(std::string_view text);

/// The three induction checks on F /\ P, each on a fresh solver:
/// I /\ ~(F /\ P), (F /\ P) /\ T /\ ~(F /\ P)', and (F /\ P) /\ ~P.
bool check_strengthening(const TransitionSystem& sys, const Cnf& f);
/// Throws CertificateError on hash or latch-count mismatch.
bool check_proof(const TransitionSystem& sys, const ProofFile& proof);

/// s_0 |= I, each step follows T under its inputs, and the last state
/// violates P. Steps are checked by simulating the netlist when the system
/// has one, otherwise by evaluating T (with a SAT call only for the
/// auxiliary variables).
bool check_trace(const TransitionSystem& sys, const Trace& t);
bool check_trace(const TransitionSystem& sys, const TraceFile& t);

/// AIGER witness for the original circuit: "1", "b0", the initial latch
/// line, one input line per time frame, ".". Latches and inputs removed by
/// cone-of-influence reduction are reported as 0 (latches with reset 1 as
/// 1); the step added by property monitoring is dropped.
std::string aiger_witness(const aiger::Prepared& prepared, const Trace& t);

}  // namespace relic::certify
