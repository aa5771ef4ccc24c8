#pragma once

// Propositional vocabulary shared by every other part of the checker:
// variables, literals, cubes, clauses, valuations and the CNF transition
// system they are assembled into.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace relic {

/// Raised when a formula or system violates a structural invariant
/// (unknown variable, complementary literals, malformed text form).
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Variable identifier. Index 0 is reserved and never names a variable.
struct Var {
  std::uint32_t index = 0;

  constexpr auto operator<=>(const Var&) const = default;
};

class Lit {
 public:
  constexpr Lit() = default;
  constexpr explicit Lit(Var v, bool negated = false)
      : code_(2 * v.index + (negated ? 1u : 0u)) {}

  static constexpr Lit from_code(std::uint32_t code) {
    Lit l;
    l.code_ = code;
    return l;
  }
  /// Signed integer form: `-3` is the negation of variable 3.
  static Lit from_dimacs(long long value);

  [[nodiscard]] constexpr Var var() const { return Var{code_ >> 1}; }
  [[nodiscard]] constexpr bool negated() const { return (code_ & 1u) != 0; }
  [[nodiscard]] constexpr std::uint32_t code() const { return code_; }
  [[nodiscard]] constexpr Lit operator~() const { return from_code(code_ ^ 1u); }
  [[nodiscard]] long long to_dimacs() const {
    return negated() ? -static_cast<long long>(var().index)
                     : static_cast<long long>(var().index);
  }

  constexpr auto operator<=>(const Lit&) const = default;

 private:
  std::uint32_t code_ = 0;
};

namespace detail {

void canonicalize(std::vector<Lit>& lits);
bool has_complementary_pair(const std::vector<Lit>& sorted);

// Sorted, duplicate-free literal array without complementary pairs. Cube and
// Clause share the representation but are distinct types.
template <class Tag>
class LiteralSet {
 public:
  LiteralSet() = default;

  /// Canonicalizes `lits`; throws StructuralError on a complementary pair.
  explicit LiteralSet(std::vector<Lit> lits) : lits_(std::move(lits)) {
    canonicalize(lits_);
    if (has_complementary_pair(lits_))
      throw StructuralError("complementary literals in " + std::string(Tag::name));
  }
  LiteralSet(std::initializer_list<Lit> lits) : LiteralSet(std::vector<Lit>(lits)) {}

  /// Like the constructor but returns nullopt instead of throwing when the
  /// literals contain a complementary pair (a tautological clause or an
  /// inconsistent cube).
  static std::optional<LiteralSet> try_make(std::vector<Lit> lits) {
    canonicalize(lits);
    if (has_complementary_pair(lits)) return std::nullopt;
    LiteralSet s;
    s.lits_ = std::move(lits);
    return s;
  }

  [[nodiscard]] std::span<const Lit> lits() const { return lits_; }
  [[nodiscard]] std::size_t size() const { return lits_.size(); }
  [[nodiscard]] bool empty() const { return lits_.empty(); }
  [[nodiscard]] auto begin() const { return lits_.begin(); }
  [[nodiscard]] auto end() const { return lits_.end(); }
  [[nodiscard]] Lit operator[](std::size_t i) const { return lits_[i]; }

  [[nodiscard]] bool contains(Lit l) const;

  /// Copy without literal `l` (no-op when absent).
  [[nodiscard]] LiteralSet without(Lit l) const {
    LiteralSet out;
    out.lits_.reserve(lits_.size());
    for (Lit x : lits_)
      if (x != l) out.lits_.push_back(x);
    return out;
  }

  [[nodiscard]] std::size_t hash() const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (Lit l : lits_) {
      h ^= l.code();
      h *= 0x100000001b3ull;
    }
    return h;
  }

  friend bool operator==(const LiteralSet&, const LiteralSet&) = default;
  friend auto operator<=>(const LiteralSet& a, const LiteralSet& b) {
    return a.lits_ <=> b.lits_;
  }

 private:
  std::vector<Lit> lits_;
};

template <class Tag>
bool LiteralSet<Tag>::contains(Lit l) const {
  auto it = std::lower_bound(lits_.begin(), lits_.end(), l);
  return it != lits_.end() && *it == l;
}

struct CubeTag {
  static constexpr const char* name = "cube";
};
struct ClauseTag {
  static constexpr const char* name = "clause";
};

}  // namespace detail

using Cube = detail::LiteralSet<detail::CubeTag>;
using Clause = detail::LiteralSet<detail::ClauseTag>;
using Cnf = std::vector<Clause>;

/// Literal-wise negation: a cube becomes the clause excluding it and back.
Clause negate(const Cube& s);
Cube negate(const Clause& c);

/// True iff literals(c) is a subset of literals(d), i.e. c implies d.
bool subsumes(const Clause& c, const Clause& d);

/// Space-separated signed indices, e.g. "-3 7 12". No trailing newline.
std::string to_text(std::span<const Lit> lits);
template <class Tag>
std::string to_text(const detail::LiteralSet<Tag>& s) {
  return to_text(s.lits());
}
/// Parses the text form; a trailing `0` terminator is accepted and dropped.
std::vector<Lit> parse_lits(std::string_view line);

/// Total valuation over variables 1..size(); index 0 is unused.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::uint32_t num_vars) : values_(num_vars + 1, false) {}

  [[nodiscard]] std::uint32_t num_vars() const {
    return static_cast<std::uint32_t>(values_.size()) - 1;
  }
  [[nodiscard]] bool value(Var v) const;
  void set(Var v, bool value);

  [[nodiscard]] bool satisfies(Lit l) const { return value(l.var()) != l.negated(); }
  [[nodiscard]] bool satisfies(const Clause& c) const;
  [[nodiscard]] bool satisfies(const Cube& s) const;
  [[nodiscard]] bool satisfies(const Cnf& f) const;

 private:
  std::vector<bool> values_;
};

/// Latch valuation indexed by latch position (not by variable).
using State = std::vector<bool>;
/// Input valuation indexed by input position.
using InputVector = std::vector<bool>;

/// And-inverter netlist giving each latch a next-state function. Uses the
/// AIGER literal convention: variable 0 is constant false, variables
/// 1..num_inputs are inputs, the following num_latches variables are
/// latches, then one variable per gate in ascending order.
struct Netlist {
  struct Gate {
    std::uint32_t lhs = 0;
    std::uint32_t rhs0 = 0;
    std::uint32_t rhs1 = 0;
  };

  std::uint32_t num_inputs = 0;
  std::uint32_t num_latches = 0;
  std::vector<Gate> gates;
  std::vector<std::uint32_t> next;

  [[nodiscard]] State step(const State& state, const InputVector& inputs) const;
  /// Checks literal ranges and gate ordering; throws StructuralError.
  void validate() const;
};

enum class VarKind { Latch, Input, Primed, Auxiliary };

/// Finite transition system (I, T, P) in CNF.
///
/// Variable layout is fixed: latches occupy 1..L, inputs L+1..L+N, primed
/// latches L+N+1..2L+N, and auxiliary (Tseitin) variables follow. I, P and
/// the literal invariants mention latches only; auxiliaries appear only in T.
class TransitionSystem {
 public:
  TransitionSystem() = default;
  TransitionSystem(std::uint32_t num_latches, std::uint32_t num_inputs,
                   std::uint32_t num_aux, Cnf init, Cnf trans, Cnf property,
                   std::vector<Lit> invariants = {},
                   std::optional<Netlist> netlist = std::nullopt);

  [[nodiscard]] std::uint32_t num_latches() const { return latches_; }
  [[nodiscard]] std::uint32_t num_inputs() const { return inputs_; }
  [[nodiscard]] std::uint32_t num_aux() const { return aux_; }
  [[nodiscard]] std::uint32_t num_vars() const { return 2 * latches_ + inputs_ + aux_; }

  [[nodiscard]] Var latch(std::uint32_t i) const { return Var{1 + i}; }
  [[nodiscard]] Var input(std::uint32_t j) const { return Var{1 + latches_ + j}; }
  [[nodiscard]] Var primed(std::uint32_t i) const { return Var{1 + latches_ + inputs_ + i}; }
  [[nodiscard]] Var aux(std::uint32_t a) const { return Var{1 + 2 * latches_ + inputs_ + a}; }

  [[nodiscard]] VarKind kind(Var v) const;
  [[nodiscard]] bool is_latch(Var v) const { return v.index >= 1 && v.index <= latches_; }

  /// Replaces every latch by its primed counterpart. Throws StructuralError
  /// on any non-latch variable.
  [[nodiscard]] Lit prime(Lit l) const;
  [[nodiscard]] Lit unprime(Lit l) const;
  [[nodiscard]] Clause prime(const Clause& c) const;
  [[nodiscard]] Cube prime(const Cube& s) const;
  [[nodiscard]] Cnf prime(const Cnf& f) const;
  [[nodiscard]] Clause unprime(const Clause& c) const;
  [[nodiscard]] Cube unprime(const Cube& s) const;

  [[nodiscard]] const Cnf& init() const { return init_; }
  [[nodiscard]] const Cnf& trans() const { return trans_; }
  [[nodiscard]] const Cnf& property() const { return property_; }
  [[nodiscard]] const std::vector<Lit>& invariants() const { return invariants_; }
  [[nodiscard]] const std::optional<Netlist>& netlist() const { return netlist_; }

  /// Full latch cube describing `state`.
  [[nodiscard]] Cube state_cube(const State& state) const;
  /// Inverse of state_cube; the cube must mention every latch.
  [[nodiscard]] State state_of(const Cube& s) const;

  /// Direct evaluation of a latch-only formula on a state.
  [[nodiscard]] bool holds(const Clause& c, const State& state) const;
  [[nodiscard]] bool holds(const Cnf& f, const State& state) const;
  [[nodiscard]] bool holds(const Cube& s, const State& state) const;

  /// Stable content hash (FNV-1a over the canonical text of I, T, P and
  /// the layout); used to tie certificates to systems.
  [[nodiscard]] std::uint64_t hash() const;

  std::vector<std::string> latch_names;
  std::vector<std::string> input_names;

 private:
  void validate() const;

  std::uint32_t latches_ = 0;
  std::uint32_t inputs_ = 0;
  std::uint32_t aux_ = 0;
  Cnf init_;
  Cnf trans_;
  Cnf property_;
  std::vector<Lit> invariants_;
  std::optional<Netlist> netlist_;
};

}  // namespace relic

template <class Tag>
struct std::hash<relic::detail::LiteralSet<Tag>> {
  std::size_t operator()(const relic::detail::LiteralSet<Tag>& s) const noexcept {
    return s.hash();
  }
};

template <>
struct std::hash<relic::Lit> {
  std::size_t operator()(relic::Lit l) const noexcept { return l.code(); }
};
