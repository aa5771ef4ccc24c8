#pragma once

// AIGER front end: parsing (ASCII and binary, versions 1.0 and 1.9),
// cone-of-influence reduction, stuck-at literal invariants, and Tseitin
// encoding into a TransitionSystem.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "relic/logic.hpp"

namespace relic::aiger {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : std::runtime_error("aiger: byte " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  [[nodiscard]] std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

enum class Reset : std::uint8_t { Zero, One, Uninit };

struct Latch {
  std::uint32_t lit = 0;
  std::uint32_t next = 0;
  Reset reset = Reset::Zero;

  friend bool operator==(const Latch&, const Latch&) = default;
};

struct AndGate {
  std::uint32_t lhs = 0;
  std::uint32_t rhs0 = 0;
  std::uint32_t rhs1 = 0;

  friend bool operator==(const AndGate&, const AndGate&) = default;
};

/// And-inverter graph with AIGER literal encoding (2*var, +1 for negation,
/// literal 0 is constant false). Gates satisfy lhs > rhs0 >= rhs1 and are
/// kept sorted by lhs, which makes them topologically ordered.
struct AigModel {
  std::uint32_t max_index = 0;
  std::vector<std::uint32_t> inputs;
  std::vector<Latch> latches;
  std::vector<std::uint32_t> outputs;
  std::vector<std::uint32_t> bad;
  std::vector<AndGate> gates;

  // Position of each input/latch in the file it was parsed from; -1 marks
  // latches synthesized after parsing.
  std::vector<int> input_origin;
  std::vector<int> latch_origin;

  /// The literal that must never evaluate to true: the first bad literal if
  /// any, otherwise the single output.
  [[nodiscard]] std::uint32_t property_literal() const;

  /// True when inputs are 1..I, latches I+1..I+L and gates follow in order.
  [[nodiscard]] bool canonical() const;

  /// Structural checks; throws StructuralError.
  void validate() const;

  friend bool operator==(const AigModel&, const AigModel&) = default;
};

/// Parses `aag` or `aig` content. Exactly one property is accepted;
/// constraint, justice and fairness sections are rejected.
AigModel parse_aiger(std::string_view bytes);
AigModel read_aiger_file(const std::filesystem::path& path);

/// Debug serializer: ASCII form in the 1.9 dialect when resets or bad
/// literals need it, 1.0 otherwise.
std::string write_ascii(const AigModel& m);

/// Renumbers to canonical order without removing anything.
AigModel canonicalize(const AigModel& m);

/// Keeps the latches, gates and inputs the property literal transitively
/// depends on through gate fan-ins and next-state functions. The result is
/// canonical.
AigModel cone_of_influence(const AigModel& m);

/// If the property literal is neither constant nor a latch literal, adds a
/// latch (reset 0) that registers it and makes that latch the property.
/// Violations then surface one step later.
AigModel monitor_property(const AigModel& m);

/// Latch literals that hold in every reachable state because the latch
/// starts at a constant and its next-state function keeps it there under
/// three-valued simulation (other latches and all inputs unknown). Literals
/// use TransitionSystem numbering: latch at position i is variable i+1.
std::vector<Lit> extract_literal_invariants(const AigModel& m);

struct EncodedTransition {
  Cnf trans;
  std::uint32_t num_aux = 0;
  Netlist netlist;
};

/// Tseitin encoding of the next-state functions of a canonical model: three
/// clauses per AND gate (one auxiliary each) plus two equality clauses per
/// latch tying its primed variable to its next-state literal.
EncodedTransition encode_transition(const AigModel& m);

/// Full system: T from encode_transition, I from reset values (uninitialized
/// latches unconstrained), P as the negation of the property literal, which
/// must be constant or a latch literal (see monitor_property).
TransitionSystem encode(const AigModel& m, const std::vector<Lit>& invariants);

/// Parsed model run through monitoring, optional cone-of-influence and
/// invariant extraction, then encoded.
struct Prepared {
  AigModel original;
  AigModel reduced;
  std::vector<Lit> invariants;
  TransitionSystem system;
  /// The property is observed through a synthesized latch, so traces carry
  /// one extra trailing step relative to the original circuit.
  bool monitored = false;
};

struct PrepareOptions {
  bool cone_of_influence = true;
  bool literal_invariants = true;
};

Prepared prepare(const AigModel& parsed, const PrepareOptions& options = {});

}  // namespace relic::aiger
