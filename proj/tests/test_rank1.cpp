#include <gtest/gtest.h>

#include <cmath>
#include <json.hpp>

#include "test_support.hpp"
#include "unicomp/error.hpp"
#include "unicomp/rank1.hpp"
#include "unicomp/verdict.hpp"

namespace unicomp {
namespace {

using testing::gram;
using testing::rect;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::InvalidArgument;
}

Rank1Values values_from(const GramPattern& g, const Vector& p) {
  Rank1Values v;
  for (const Edge& e : g.edges()) v[e] = p[e.a] * p[e.b];
  return v;
}

TEST(GramRank1, Triangle) {
  const Rank1Verdict v = check_gram_rank1(gram(3, {{1, 2}, {2, 3}, {1, 3}}));
  EXPECT_TRUE(v.minimally_locally);
  EXPECT_TRUE(v.locally);
  EXPECT_TRUE(v.minimally_globally);
  EXPECT_TRUE(v.globally);
  ASSERT_EQ(v.components.size(), 1u);
  EXPECT_FALSE(v.components[0].bipartite);
  EXPECT_EQ(v.components[0].edge_count, 3u);
}

TEST(GramRank1, FourCycle) {
  const Rank1Verdict v = check_gram_rank1(gram(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}}));
  EXPECT_FALSE(v.locally);
  EXPECT_FALSE(v.globally);
  EXPECT_TRUE(v.components[0].bipartite);
}

TEST(GramRank1, TwoTriangles) {
  const Rank1Verdict v = check_gram_rank1(gram(6, {{1, 2}, {2, 3}, {1, 3}, {4, 5}, {5, 6}, {4, 6}}));
  EXPECT_TRUE(v.minimally_locally);
  EXPECT_TRUE(v.locally);
  EXPECT_FALSE(v.minimally_globally);
  EXPECT_FALSE(v.globally);
}

TEST(GramRank1, SelfLoopIsAnOddCycle) {
  const Rank1Verdict v = check_gram_rank1(gram(2, {{1, 1}, {1, 2}}));
  EXPECT_TRUE(v.minimally_locally);
  EXPECT_TRUE(v.globally);
  EXPECT_TRUE(v.components[0].has_self_loop);
  EXPECT_FALSE(check_gram_rank1(gram(2, {{1, 1}})).locally);  // vertex 2 unconstrained
}

TEST(GramRank1, RedundantIsNotMinimal) {
  const Rank1Verdict v = check_gram_rank1(gram(3, {{1, 1}, {1, 2}, {2, 3}, {1, 3}}));
  EXPECT_TRUE(v.locally);
  EXPECT_FALSE(v.minimally_locally);
  EXPECT_TRUE(v.globally);
  EXPECT_FALSE(v.minimally_globally);
}

TEST(GramRank1, PredicateImplications) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const Rank1Verdict v = check_gram_rank1(sample_gram(2 + seed % 9, 0.1 + std::fmod(0.002 * static_cast<double>(seed), 0.6), seed));
    if (v.minimally_locally) EXPECT_TRUE(v.locally);
    if (v.minimally_globally) EXPECT_TRUE(v.globally);
    if (v.globally) EXPECT_TRUE(v.locally);
  }
}

TEST(GramRank1, MatchesRandomizedTestExhaustivelyUpToFourVertices) {
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cells = testing::gram_cells(n);
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << cells.size()); ++mask) {
      const GramPattern g = testing::gram_from_mask(n, cells, mask);
      TestConfig cfg;
      cfg.seed = mask * 31 + n;
      const Verdict v = test_local(g, 1, cfg);
      ASSERT_EQ(check_gram_rank1(g).locally, v.completable) << format_pattern(g);
    }
  }
}

TEST(RectRank1, Examples) {
  const Rank1Verdict single = check_rect_rank1(rect(2, 2, {{1, 1}}));
  EXPECT_FALSE(single.locally);
  EXPECT_FALSE(single.globally);
  EXPECT_EQ(single.components.size(), 3u);

  const Rank1Verdict star = check_rect_rank1(rect(3, 3, {{1, 1}, {1, 2}, {1, 3}, {2, 1}, {3, 1}}));
  EXPECT_TRUE(star.minimally_locally);
  EXPECT_TRUE(star.globally);

  const Rank1Verdict full = check_rect_rank1(rect(2, 2, {{1, 1}, {1, 2}, {2, 1}, {2, 2}}));
  EXPECT_TRUE(full.locally);
  EXPECT_FALSE(full.minimally_locally);
  EXPECT_TRUE(full.globally);
}

TEST(RectRank1, MatchesRandomizedTest) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const RectPattern p = sample_rect(1 + seed % 4, 1 + seed / 4 % 4, 0.5, seed);
    if (p.m() == 0) continue;
    TestConfig cfg;
    cfg.seed = seed;
    EXPECT_EQ(check_rect_rank1(p).locally, test_local(p, 1, cfg).completable) << format_pattern(p);
  }
}

TEST(CycleDeterminant, ClosedForm) {
  const double ones[] = {1, 1, 1};
  EXPECT_DOUBLE_EQ(cycle_determinant(ones), 2.0);
  const double four[] = {1.5, -2, 3, 0.7};
  EXPECT_EQ(cycle_determinant(four), 0.0);
  EXPECT_NEAR(cycle_matrix(four).determinant(), 0.0, 1e-12);
  const double loop[] = {3};
  EXPECT_DOUBLE_EQ(cycle_determinant(loop), 6.0);
  EXPECT_DOUBLE_EQ(cycle_matrix(loop)(0, 0), 6.0);
  EXPECT_THROW(cycle_determinant(std::span<const double>{}), Error);
}

TEST(CycleDeterminant, MatchesDenseDeterminant) {
  Rng rng(44);
  for (std::size_t l = 1; l <= 12; ++l) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> p(l);
      for (double& x : p) x = rng.normal();
      const double closed = cycle_determinant(p);
      const double dense = cycle_matrix(p).determinant();
      double scale = 1.0;
      for (double x : p) scale *= std::abs(x);
      EXPECT_LE(std::abs(closed - dense), 1e-10 * std::max(std::abs(closed), scale)) << "L = " << l;
    }
  }
}

TEST(Complete, TriangleExample) {
  const GramPattern g = gram(3, {{1, 2}, {2, 3}, {1, 3}});
  const Rank1Values v = parse_values("1 2 -2\n2 3 -6\n1 3 3\n");
  const Rank1Completion c = complete_gram_rank1(g, v);
  Vector want(3);
  want << 1, -2, 3;
  EXPECT_LE((c.points - want).norm(), 1e-12);
}

TEST(Complete, SelfLoopExample) {
  const Rank1Completion c = complete_gram_rank1(gram(2, {{1, 1}, {1, 2}}), parse_values("1 1 9\n1 2 6\n"));
  EXPECT_NEAR(c.points[0], 3.0, 1e-12);
  EXPECT_NEAR(c.points[1], 2.0, 1e-12);
}

TEST(Complete, Errors) {
  const GramPattern c4 = gram(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}});
  EXPECT_EQ(code_of([&] { complete_gram_rank1(c4, values_from(c4, Vector::Ones(4))); }),
            ErrorCode::Underdetermined);

  const GramPattern tri = gram(3, {{1, 2}, {2, 3}, {1, 3}});
  EXPECT_EQ(code_of([&] { complete_gram_rank1(tri, parse_values("1 2 0\n2 3 1\n1 3 1\n")); }), ErrorCode::ZeroEntry);
  EXPECT_EQ(code_of([&] { complete_gram_rank1(tri, parse_values("1 2 1e-20\n2 3 1\n1 3 1\n")); }),
            ErrorCode::ZeroEntry);
  // An odd number of negative entries around a triangle has no real solution.
  EXPECT_EQ(code_of([&] { complete_gram_rank1(tri, parse_values("1 2 -1\n2 3 1\n1 3 1\n")); }),
            ErrorCode::SignInconsistent);
  EXPECT_EQ(code_of([&] { complete_gram_rank1(tri, parse_values("1 2 1\n2 3 1\n")); }), ErrorCode::InvalidArgument);

  const GramPattern k4 = gram(4, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
  Vector p(4);
  p << 1.5, -0.5, 2.0, 0.8;
  Rank1Values bad = values_from(k4, p);
  bad[Edge{2, 3}] *= 1.001;
  EXPECT_EQ(code_of([&] { complete_gram_rank1(k4, bad); }), ErrorCode::NotRank1Consistent);
}

TEST(Complete, RoundTripRandomInstances) {
  Rng rng(8);
  int done = 0;
  for (std::uint64_t seed = 0; done < 100; ++seed) {
    const GramPattern g = sample_gram(3 + seed % 12, 0.35, seed);
    if (!check_gram_rank1(g).locally) continue;
    Vector p(static_cast<Eigen::Index>(g.n()));
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = rng.normal();
    const Rank1Completion c = complete_gram_rank1(g, values_from(g, p));
    for (const auto& comp : c.components) {
      const double sign = c.points[comp[0]] * p[comp[0]] > 0 ? 1.0 : -1.0;
      for (std::size_t v : comp) {
        EXPECT_LE(std::abs(sign * c.points[v] - p[v]), 1e-8 * std::abs(p[v]));
      }
    }
    ++done;
  }
}

TEST(Values, ParseErrors) {
  EXPECT_EQ(code_of([] { parse_values("1 2\n"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { parse_values("1 2 3 4\n"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { parse_values("0 2 3\n"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { parse_values("1 2 3\n2 1 4\n"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { parse_values("1 2 nan\n"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { read_values_file("/nonexistent"); }), ErrorCode::Io);
  const Rank1Values v = parse_values("# comment\n\n2 1 -4.5\n");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.begin()->first, (Edge{0, 1}));
  EXPECT_EQ(v.begin()->second, -4.5);
}

TEST(Rank1Json, Shapes) {
  const auto j = nlohmann::json::parse(rank1_verdict_json(check_gram_rank1(gram(3, {{1, 2}, {2, 3}, {1, 3}})),
                                                          PatternKind::Gram));
  EXPECT_EQ(j["minimally_locally"], true);
  EXPECT_EQ(j["components"][0]["vertices"], nlohmann::json::array({1, 2, 3}));
  const auto c = nlohmann::json::parse(rank1_completion_json(
      complete_gram_rank1(gram(2, {{1, 1}, {1, 2}}), parse_values("1 1 9\n1 2 6\n"))));
  EXPECT_EQ(c["points"].size(), 2u);
  EXPECT_TRUE(c.contains("note"));
}

}  // namespace
}  // namespace unicomp
