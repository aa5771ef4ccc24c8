#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "relic/sat.hpp"

using namespace relic;
using namespace relic::testing;

namespace {

Lit L(long long v) { return Lit::from_dimacs(v); }

std::vector<std::vector<Lit>> random_cnf(std::mt19937_64& rng, std::uint32_t vars, std::size_t clauses) {
  std::uniform_int_distribution<std::uint32_t> var(1, vars);
  std::uniform_int_distribution<int> width(1, 4);
  std::vector<std::vector<Lit>> out;
  for (std::size_t i = 0; i < clauses; ++i) {
    std::vector<Lit> c;
    const int w = width(rng);
    for (int j = 0; j < w; ++j) c.push_back(Lit(Var{var(rng)}, (rng() & 1u) != 0));
    out.push_back(std::move(c));
  }
  return out;
}

bool satisfies(const sat::Solver& s, const std::vector<std::vector<Lit>>& f) {
  for (const auto& c : f) {
    bool any = false;
    for (Lit l : c) any = any || s.model_value(l);
    if (!any) return false;
  }
  return true;
}

}  // namespace

TEST(Solver, Trivial) {
  sat::Solver s;
  s.ensure_vars(2);
  EXPECT_EQ(s.solve(), sat::Status::Sat);
  s.add_clause({L(1), L(2)});
  s.add_clause({L(-1)});
  ASSERT_EQ(s.solve(), sat::Status::Sat);
  EXPECT_TRUE(s.model_value(L(2)));
  EXPECT_FALSE(s.add_clause({L(-2)}));
  EXPECT_EQ(s.solve(), sat::Status::Unsat);
  EXPECT_TRUE(s.core().empty());
}

TEST(Solver, EmptyClause) {
  sat::Solver s;
  s.ensure_vars(1);
  EXPECT_FALSE(s.add_clause(std::span<const Lit>{}));
  EXPECT_EQ(s.solve(), sat::Status::Unsat);
}

TEST(Solver, UndeclaredVariable) {
  sat::Solver s;
  s.ensure_vars(2);
  EXPECT_THROW(s.add_clause({L(3)}), StructuralError);
}

TEST(Solver, AssumptionsAndCore) {
  sat::Solver s;
  s.ensure_vars(4);
  s.add_clause({L(-1), L(2)});
  s.add_clause({L(-2), L(3)});
  EXPECT_EQ(s.solve({L(1), L(-3), L(4)}), sat::Status::Unsat);
  EXPECT_TRUE(s.in_core(L(1)));
  EXPECT_TRUE(s.in_core(L(-3)));
  EXPECT_FALSE(s.in_core(L(4)));
  // assumptions leave no trace
  ASSERT_EQ(s.solve({L(1)}), sat::Status::Sat);
  EXPECT_TRUE(s.model_value(L(3)));
  EXPECT_EQ(s.solve({L(-3)}), sat::Status::Sat);
  EXPECT_FALSE(s.model_value(L(1)));
}

TEST(Solver, ContradictoryAssumptions) {
  sat::Solver s;
  s.ensure_vars(2);
  EXPECT_EQ(s.solve({L(1), L(-1)}), sat::Status::Unsat);
  EXPECT_TRUE(s.in_core(L(1)) || s.in_core(L(-1)));
  EXPECT_EQ(s.solve({L(1)}), sat::Status::Sat);
}

TEST(Solver, Pigeonhole) {
  // 5 pigeons, 4 holes
  const int p = 5, h = 4;
  auto v = [&](int i, int j) { return L(i * h + j + 1); };
  sat::Solver s;
  s.ensure_vars(p * h);
  for (int i = 0; i < p; ++i) {
    std::vector<Lit> c;
    for (int j = 0; j < h; ++j) c.push_back(v(i, j));
    s.add_clause(c);
  }
  for (int j = 0; j < h; ++j)
    for (int a = 0; a < p; ++a)
      for (int b = a + 1; b < p; ++b) s.add_clause({~v(a, j), ~v(b, j)});
  EXPECT_EQ(s.solve(), sat::Status::Unsat);
}

TEST(Solver, InterruptGivesUnknown) {
  const int p = 9, h = 8;
  auto v = [&](int i, int j) { return L(i * h + j + 1); };
  sat::Solver s;
  s.ensure_vars(p * h);
  for (int i = 0; i < p; ++i) {
    std::vector<Lit> c;
    for (int j = 0; j < h; ++j) c.push_back(v(i, j));
    s.add_clause(c);
  }
  for (int j = 0; j < h; ++j)
    for (int a = 0; a < p; ++a)
      for (int b = a + 1; b < p; ++b) s.add_clause({~v(a, j), ~v(b, j)});
  s.set_interrupt([] { return true; });
  EXPECT_EQ(s.solve(), sat::Status::Unknown);
}

TEST(Solver, RandomCnfsAgainstTruthTable) {
  std::mt19937_64 rng(2024);
  int sat_count = 0;
  for (int round = 0; round < 200; ++round) {
    const std::uint32_t vars = 1 + static_cast<std::uint32_t>(rng() % 20);
    const std::size_t clauses = static_cast<std::size_t>(vars * 3 + rng() % (vars + 1));
    const auto f = random_cnf(rng, vars, clauses);
    sat::Solver s(round);
    s.ensure_vars(vars);
    for (const auto& c : f) s.add_clause(c);
    const sat::Status st = s.solve();
    ASSERT_EQ(st == sat::Status::Sat, brute_sat(f, vars)) << "round " << round;
    if (st == sat::Status::Sat) {
      ++sat_count;
      EXPECT_TRUE(satisfies(s, f)) << "round " << round;
    }
  }
  EXPECT_GT(sat_count, 20);
  EXPECT_LT(sat_count, 180);
}

TEST(Solver, IncrementalMatchesFreshUnderAssumptions) {
  std::mt19937_64 rng(77);
  for (int round = 0; round < 30; ++round) {
    const std::uint32_t vars = 12;
    sat::Solver inc(round);
    inc.ensure_vars(vars);
    std::vector<std::vector<Lit>> all;
    for (int step = 0; step < 12; ++step) {
      for (auto& c : random_cnf(rng, vars, 4)) {
        inc.add_clause(c);
        all.push_back(c);
      }
      std::vector<Lit> assume;
      for (std::uint32_t v = 1; v <= 3; ++v) assume.push_back(Lit(Var{v + static_cast<std::uint32_t>(rng() % 9)}, (rng() & 1u) != 0));
      std::vector<std::vector<Lit>> with = all;
      for (Lit a : assume) with.push_back({a});
      const bool expected = brute_sat(with, vars);
      ASSERT_EQ(inc.solve(assume) == sat::Status::Sat, expected) << round << "/" << step;
      if (!expected && !inc.core().empty()) {
        // the core alone must already be contradictory
        std::vector<std::vector<Lit>> core = all;
        for (Lit a : inc.core()) core.push_back({a});
        EXPECT_FALSE(brute_sat(core, vars));
      }
    }
  }
}

TEST(SolverCtx, ActivationLiteralsScopeClauses) {
  sat::SolverCtx ctx(2);
  const Clause a{L(1)}, b{L(-1)};
  ctx.add_guarded(a, 1);
  ctx.add_guarded(b, 2);
  const Lit act1 = ctx.activation_literal(1), act2 = ctx.activation_literal(2);
  EXPECT_EQ(ctx.activation_literal(1), act1);
  EXPECT_EQ(ctx.solve(std::vector<Lit>{act1}), sat::Status::Sat);
  EXPECT_EQ(ctx.solve(std::vector<Lit>{act2}), sat::Status::Sat);
  EXPECT_EQ(ctx.solve(std::vector<Lit>{act1, act2}), sat::Status::Unsat);
  EXPECT_EQ(ctx.solve(std::vector<Lit>{}), sat::Status::Sat);
}

TEST(SolverCtx, RetiredGuardsStayOff) {
  sat::SolverCtx ctx(1);
  const Lit g = ctx.fresh_guard();
  ctx.add_guarded(std::vector<Lit>{L(1)}, g);
  ctx.add_clause(Clause{L(-1)});
  EXPECT_EQ(ctx.solve(std::vector<Lit>{g}), sat::Status::Unsat);
  ctx.retire(g);
  EXPECT_EQ(ctx.retired(), 1u);
  EXPECT_EQ(ctx.solve(std::vector<Lit>{}), sat::Status::Sat);
}

TEST(Dimacs, RoundTrip) {
  std::istringstream in("c comment\np cnf 3 2\n1 -2 0\n2 3\n-1 0\n");
  const sat::DimacsCnf cnf = sat::read_dimacs(in);
  EXPECT_EQ(cnf.num_vars, 3u);
  ASSERT_EQ(cnf.clauses.size(), 2u);
  EXPECT_EQ(cnf.clauses[1].size(), 3u);
  std::ostringstream out;
  sat::write_dimacs(out, cnf);
  std::istringstream back(out.str());
  const sat::DimacsCnf again = sat::read_dimacs(back);
  EXPECT_EQ(again.clauses, cnf.clauses);
}

TEST(Dimacs, Malformed) {
  std::istringstream no_header("1 2 0\n");
  EXPECT_THROW(sat::read_dimacs(no_header), StructuralError);
  std::istringstream out_of_range("p cnf 2 1\n1 3 0\n");
  EXPECT_THROW(sat::read_dimacs(out_of_range), StructuralError);
}
