#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "relic/aiger.hpp"
#include "relic/oracle.hpp"
#include "relic/sat.hpp"

using namespace relic;
using namespace relic::testing;
namespace aig = relic::aiger;

namespace {

// Reference binary writer for canonical models.
std::string to_binary(const aig::AigModel& m) {
  std::string out = "aig " + std::to_string(m.max_index) + ' ' + std::to_string(m.inputs.size()) + ' ' +
                    std::to_string(m.latches.size()) + ' ' + std::to_string(m.outputs.size()) + ' ' +
                    std::to_string(m.gates.size());
  if (!m.bad.empty()) out += ' ' + std::to_string(m.bad.size());
  out += '\n';
  for (const aig::Latch& l : m.latches) {
    out += std::to_string(l.next);
    if (l.reset == aig::Reset::One) out += " 1";
    if (l.reset == aig::Reset::Uninit) out += ' ' + std::to_string(l.lit);
    out += '\n';
  }
  for (std::uint32_t o : m.outputs) out += std::to_string(o) + '\n';
  for (std::uint32_t b : m.bad) out += std::to_string(b) + '\n';
  auto varint = [&](std::uint32_t x) {
    while (x & ~0x7fu) {
      out += static_cast<char>((x & 0x7fu) | 0x80u);
      x >>= 7;
    }
    out += static_cast<char>(x);
  };
  for (const aig::AndGate& g : m.gates) {
    varint(g.lhs - g.rhs0);
    varint(g.rhs0 - g.rhs1);
  }
  return out;
}

// toy7's next-state functions as gates; y0/y1 reset to 0/1.
const char* kToy7Aag =
    "aag 12 0 7 0 5 1\n"
    "2 3 1\n4 5\n6 17 1\n8 18\n10 20 1\n12 23 1\n14 24 1\n"
    "15\n"
    "16 5 3\n18 9 6\n20 11 6\n22 11 9\n24 12 6\n";

std::size_t error_offset(std::string_view text) {
  try {
    aig::parse_aiger(text);
  } catch (const aig::ParseError& e) {
    return e.offset();
  }
  ADD_FAILURE() << "no parse error for: " << text;
  return 0;
}

}  // namespace

TEST(AigerParse, SmallestLatchModel) {
  const aig::AigModel m = aig::parse_aiger("aag 1 0 1 1 0\n2 2\n2\n");
  ASSERT_EQ(m.latches.size(), 1u);
  EXPECT_EQ(m.latches[0], (aig::Latch{2, 2, aig::Reset::Zero}));
  EXPECT_EQ(m.property_literal(), 2u);
  const aig::Prepared p = aig::prepare(m);
  EXPECT_FALSE(p.monitored);
  EXPECT_EQ(p.system.property(), (Cnf{{Lit(Var{1}, true)}}));
  EXPECT_EQ(oracle::bfs_verdict(p.system).outcome, Outcome::Safe);
}

TEST(AigerParse, ConstantProperty) {
  const aig::AigModel m = aig::parse_aiger("aag 0 0 0 1 0\n0\n");
  EXPECT_EQ(m.property_literal(), 0u);
  const aig::Prepared p = aig::prepare(m);
  EXPECT_EQ(p.system.num_latches(), 0u);
  EXPECT_TRUE(p.system.property().empty());
  EXPECT_EQ(oracle::bfs_verdict(p.system).outcome, Outcome::Safe);
}

TEST(AigerParse, BadSectionWinsOverOutputs) {
  const aig::AigModel m = aig::parse_aiger("aag 2 1 1 0 0 1\n2\n4 2 4\n5\n");
  EXPECT_EQ(m.property_literal(), 5u);
  EXPECT_EQ(m.latches[0].reset, aig::Reset::Uninit);
}

TEST(AigerParse, SymbolsAndComments) {
  const aig::AigModel m = aig::parse_aiger("aag 1 1 0 1 0\n2\n2\ni0 req\no0 bad\nc\nanything goes\n");
  EXPECT_EQ(m.inputs.size(), 1u);
}

TEST(AigerParse, ErrorsNameByteOffsets) {
  EXPECT_EQ(error_offset("aax 1 0 0 1 0\n"), 0u);
  EXPECT_EQ(error_offset("aag 1 0 0\n"), 0u);
  // output literal uses variable 2 > M
  EXPECT_EQ(error_offset("aag 1 1 0 1 0\n2\n4\n"), 16u);
  // second character of the latch line is not a space
  EXPECT_EQ(error_offset("aag 1 0 1 1 0\n2x2\n2\n"), 15u);
  // gate operand not below the gate: offset of that gate's line
  EXPECT_EQ(error_offset("aag 3 1 0 1 2\n2\n4\n4 6 2\n6 2 2\n"), 18u);
  // variable defined twice: offset of the second definition
  EXPECT_EQ(error_offset("aag 2 1 1 1 0\n2\n2 2\n2\n"), 16u);
  // undefined variable
  EXPECT_EQ(error_offset("aag 2 1 0 1 0\n2\n4\n"), 16u);
  // invalid reset
  EXPECT_GT(error_offset("aag 1 0 1 1 0\n2 2 6\n2\n"), 0u);
  // truncated
  EXPECT_GT(error_offset("aag 1 1 0 1 0\n2\n"), 0u);
}

TEST(AigerParse, UnsupportedSections) {
  EXPECT_THROW(aig::parse_aiger("aag 1 1 0 0 0 0 1\n2\n2\n"), aig::ParseError);
  EXPECT_THROW(aig::parse_aiger("aag 1 1 0 0 0 0 0 1\n2\n1\n2\n"), aig::ParseError);
  EXPECT_THROW(aig::parse_aiger("aag 1 1 0 2 0\n2\n2\n3\n"), aig::ParseError);
  EXPECT_THROW(aig::parse_aiger("aag 1 1 0 0 0 2\n2\n2\n3\n"), aig::ParseError);
  EXPECT_THROW(aig::parse_aiger("aag 1 1 0 0 0\n2\n"), aig::ParseError);
  try {
    aig::parse_aiger("aag 1 1 0 0 0 0 1\n2\n2\n");
  } catch (const aig::ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("constraints"), std::string::npos);
  }
}

TEST(AigerParse, BinaryMatchesAsciiTwin) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 100; ++round) {
    const aig::AigModel m = random_model(rng);
    const aig::AigModel from_ascii = aig::parse_aiger(aig::write_ascii(m));
    const aig::AigModel from_binary = aig::parse_aiger(to_binary(m));
    ASSERT_EQ(from_ascii, m) << aig::write_ascii(m);
    ASSERT_EQ(from_binary, m) << aig::write_ascii(m);
  }
}

TEST(AigerParse, BinaryHeaderContract) {
  EXPECT_THROW(aig::parse_aiger("aig 3 1 0 1 1\n2\n"), aig::ParseError);
  // delta pointing below zero
  std::string bad = "aig 2 1 0 1 1\n4\n";
  bad += static_cast<char>(5);
  bad += static_cast<char>(0);
  EXPECT_THROW(aig::parse_aiger(bad), aig::ParseError);
}

TEST(AigerParse, RoundTripSerializer) {
  const aig::AigModel m = aig::parse_aiger(kToy7Aag);
  EXPECT_TRUE(m.canonical());
  EXPECT_EQ(aig::parse_aiger(aig::write_ascii(m)), m);
  EXPECT_EQ(aig::parse_aiger(to_binary(m)), m);
}

TEST(AigerCoi, EmptyCone) {
  // property is an input: nothing sequential matters
  const aig::AigModel m = aig::parse_aiger("aag 3 1 2 0 0 1\n2\n4 6\n6 4\n2\n");
  const aig::AigModel r = aig::cone_of_influence(m);
  EXPECT_EQ(r.latches.size(), 0u);
  EXPECT_EQ(r.inputs.size(), 1u);
  // the monitored form keeps only the monitor latch
  EXPECT_EQ(aig::prepare(m).system.num_latches(), 1u);
}

TEST(AigerCoi, Toy7KeepsEveryLatch) {
  const aig::AigModel m = aig::parse_aiger(kToy7Aag);
  const aig::AigModel r = aig::cone_of_influence(m);
  EXPECT_EQ(r.latches.size(), 7u);
  EXPECT_EQ(r.gates.size(), 5u);
}

TEST(AigerCoi, DropsUnrelatedLogic) {
  // latch 4 feeds the property, latch 6 and the input do not
  const aig::AigModel m = aig::parse_aiger("aag 4 1 2 0 1 1\n2\n4 5\n6 8\n5\n8 6 2\n");
  const aig::AigModel r = aig::cone_of_influence(m);
  ASSERT_EQ(r.latches.size(), 1u);
  EXPECT_EQ(r.latch_origin, (std::vector<int>{0}));
  EXPECT_TRUE(r.inputs.empty());
  EXPECT_TRUE(r.gates.empty());
}

TEST(AigerCoi, VerdictPreservedSmall) {
  std::mt19937_64 rng(5);
  RandomShape shape;
  shape.max_latches = 11;
  for (int round = 0; round < 60; ++round) {
    const aig::AigModel m = random_model(rng, shape);
    const aig::Prepared full = aig::prepare(m, {false, false});
    const aig::Prepared cone = aig::prepare(m, {true, false});
    EXPECT_LE(cone.system.num_latches(), full.system.num_latches());
    EXPECT_EQ(oracle::bfs_verdict(full.system).outcome, oracle::bfs_verdict(cone.system).outcome)
        << aig::write_ascii(m);
  }
}

TEST(AigerCoi, VerdictPreservedTwentyLatches) {
  std::mt19937_64 rng(6);
  RandomShape shape;
  shape.min_latches = shape.max_latches = 20;
  shape.max_inputs = 2;
  shape.max_gates = 30;
  for (int round = 0; round < 4; ++round) {
    const aig::AigModel m = random_model(rng, shape);
    const aig::Prepared full = aig::prepare(m, {false, false});
    const aig::Prepared cone = aig::prepare(m, {true, false});
    if (full.system.num_latches() + full.system.num_inputs() > oracle::kBudget) continue;
    EXPECT_EQ(oracle::bfs_verdict(full.system).outcome, oracle::bfs_verdict(cone.system).outcome);
  }
}

TEST(AigerInvariants, StuckAtLiterals) {
  // reset 1, next = itself
  EXPECT_EQ(aig::extract_literal_invariants(aig::parse_aiger("aag 1 0 1 1 0\n2 2 1\n2\n")),
            (std::vector<Lit>{Lit(Var{1})}));
  // reset 0, next = constant 0
  EXPECT_EQ(aig::extract_literal_invariants(aig::parse_aiger("aag 1 0 1 1 0\n2 0\n2\n")),
            (std::vector<Lit>{Lit(Var{1}, true)}));
  // toggler: nothing
  EXPECT_TRUE(aig::extract_literal_invariants(aig::parse_aiger("aag 1 0 1 1 0\n2 3\n2\n")).empty());
  // uninitialized latch: nothing
  EXPECT_TRUE(aig::extract_literal_invariants(aig::parse_aiger("aag 1 0 1 1 0\n2 2 2\n2\n")).empty());
  // two latches holding each other at 0 through a gate
  EXPECT_EQ(aig::extract_literal_invariants(aig::parse_aiger("aag 4 1 2 1 1\n2\n4 8\n6 4\n6\n8 6 2\n")),
            (std::vector<Lit>{Lit(Var{1}, true), Lit(Var{2}, true)}));
}

TEST(AigerInvariants, HoldOnReachableStates) {
  std::mt19937_64 rng(8);
  std::size_t found = 0;
  for (int round = 0; round < 50; ++round) {
    aig::AigModel m = random_model(rng);
    // plant some stuck-at structure
    m.latches[0].next = m.latches[0].lit;
    m.latches[0].reset = aig::Reset::One;
    m.latches[1].next = 0;
    m.latches[1].reset = aig::Reset::Zero;
    const aig::Prepared p = aig::prepare(m, {false, true});
    const aig::Prepared plain = aig::prepare(m, {false, false});
    const std::vector<bool> reach = oracle::reachable_dfs(plain.system);
    found += p.invariants.size();
    for (Lit l : p.invariants)
      for (std::size_t s = 0; s < reach.size(); ++s)
        if (reach[s]) {
          const bool v = ((s >> (l.var().index - 1)) & 1u) != 0;
          ASSERT_NE(v, l.negated()) << "round " << round << " literal " << l.to_dimacs();
        }
  }
  EXPECT_GE(found, 100u);
}

TEST(AigerEncode, TseitinForAnd) {
  // inputs b, c; latch l with next a = b & c
  const aig::AigModel m = aig::parse_aiger("aag 4 2 1 1 1\n2\n4\n6 8\n6\n8 4 2\n");
  const aig::EncodedTransition t = aig::encode_transition(m);
  // layout: latch 1, inputs 2 3, primed 4, aux 5
  const Lit a(Var{5}), b(Var{2}), c(Var{3}), p(Var{4});
  const std::set<Clause> got(t.trans.begin(), t.trans.end());
  const std::set<Clause> want{{~a, b}, {~a, c}, {a, ~b, ~c}, {~p, a}, {p, ~a}};
  EXPECT_EQ(got, want);
  EXPECT_EQ(t.num_aux, 1u);
}

TEST(AigerEncode, ResetsBecomeInit) {
  const aig::AigModel m = aig::parse_aiger("aag 3 0 3 0 0 1\n2 2\n4 4 1\n6 6 6\n6\n");
  const TransitionSystem sys = aig::encode(m, {});
  EXPECT_EQ(sys.init(), (Cnf{{Lit(Var{1}, true)}, {Lit(Var{2})}}));
  EXPECT_EQ(sys.property(), (Cnf{{Lit(Var{3}, true)}}));
}

TEST(AigerEncode, Toy7TwinHasSameTransitions) {
  const TransitionSystem hand = toy7();
  const aig::AigModel twin = aig::parse_aiger(kToy7Aag);
  const TransitionSystem enc = aig::prepare(twin).system;
  ASSERT_EQ(enc.num_latches(), 7u);
  for (std::uint32_t s = 0; s < 128; ++s) {
    State st(7);
    for (std::uint32_t i = 0; i < 7; ++i) st[i] = ((s >> i) & 1u) != 0;
    const State expected = simulate(twin, st, {});
    std::set<std::uint32_t> hand_next;
    for (std::uint32_t t = 0; t < 128; ++t) {
      Assignment a(hand.num_vars());
      for (std::uint32_t i = 0; i < 7; ++i) {
        a.set(hand.latch(i), st[i]);
        a.set(hand.primed(i), ((t >> i) & 1u) != 0);
      }
      if (a.satisfies(hand.trans())) hand_next.insert(t);
    }
    std::uint32_t e = 0;
    for (std::uint32_t i = 0; i < 7; ++i) e |= expected[i] ? 1u << i : 0u;
    ASSERT_EQ(hand_next, (std::set<std::uint32_t>{e})) << "state " << s;
  }
}

TEST(AigerEncode, CnfTransitionsMatchSimulation) {
  std::mt19937_64 rng(9);
  RandomShape shape;
  shape.max_latches = 8;
  for (int round = 0; round < 25; ++round) {
    const aig::AigModel m = random_model(rng, shape);
    const aig::EncodedTransition t = aig::encode_transition(m);
    const std::uint32_t nl = static_cast<std::uint32_t>(m.latches.size());
    const std::uint32_t ni = static_cast<std::uint32_t>(m.inputs.size());
    sat::Solver s;
    s.ensure_vars(2 * nl + ni + t.num_aux);
    for (const Clause& c : t.trans) s.add_clause(c);
    for (std::uint32_t st = 0; st < (1u << nl); ++st)
      for (std::uint32_t in = 0; in < (1u << ni); ++in) {
        State cur(nl);
        InputVector iv(ni);
        std::vector<Lit> assume;
        for (std::uint32_t i = 0; i < nl; ++i) {
          cur[i] = ((st >> i) & 1u) != 0;
          assume.push_back(Lit(Var{1 + i}, !cur[i]));
        }
        for (std::uint32_t j = 0; j < ni; ++j) {
          iv[j] = ((in >> j) & 1u) != 0;
          assume.push_back(Lit(Var{1 + nl + j}, !iv[j]));
        }
        const State next = simulate(m, cur, iv);
        std::vector<Lit> with = assume;
        for (std::uint32_t i = 0; i < nl; ++i) with.push_back(Lit(Var{1 + nl + ni + i}, !next[i]));
        ASSERT_EQ(s.solve(with), sat::Status::Sat);
        // no other successor: block the simulated one
        const Lit g(s.new_var());
        std::vector<Lit> block{~g};
        for (std::uint32_t i = 0; i < nl; ++i) block.push_back(Lit(Var{1 + nl + ni + i}, next[i]));
        s.add_clause(block);
        assume.push_back(g);
        ASSERT_EQ(s.solve(assume), sat::Status::Unsat);
        s.add_clause({~g});
      }
  }
}

TEST(AigerPrepare, MonitorAddsOneLatch) {
  // bad is a gate over two latches
  const aig::AigModel m = aig::parse_aiger("aag 3 0 2 0 1 1\n2 3\n4 2\n6\n6 4 2\n");
  const aig::Prepared p = aig::prepare(m);
  EXPECT_TRUE(p.monitored);
  EXPECT_EQ(p.system.num_latches(), 3u);
  EXPECT_EQ(p.reduced.latch_origin.back(), -1);
}

TEST(AigerPrepare, LatchCountFromHeader) {
  const aig::AigModel m = aig::read_aiger_file(std::string(RELIC_SAMPLES) + "/toy7.aag");
  EXPECT_EQ(m.latches.size(), 7u);
  EXPECT_EQ(aig::prepare(m, {false, false}).system.num_latches(), 7u);
}
