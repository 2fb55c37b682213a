#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <json.hpp>

#include "unicomp/error.hpp"
#include "unicomp/harness.hpp"
#include "unicomp/rank1.hpp"
#include "unicomp/rng.hpp"

namespace unicomp {
namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::InvalidArgument;
}

std::vector<std::pair<double, double>> exact_points(double a1, double a2, double a3) {
  std::vector<std::pair<double, double>> pts;
  for (double n = 100; n <= 1600; n *= 1.4) {
    const double ln = std::log(n);
    pts.emplace_back(n, std::exp(a1 * ln + a2 * std::log(ln) + a3));
  }
  return pts;
}

// Empirical 50% point of the exact rank-1 Gram predicate, from a beta grid.
double rank1_grid_threshold(std::size_t n, std::size_t trials) {
  std::vector<double> betas, rates;
  for (double beta = 0.01; beta <= 0.4; beta *= 1.05) {
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const GramPattern g = sample_gram(n, beta, derive_seed(777, {static_cast<std::uint64_t>(betas.size()), t}));
      hits += g.m() > 0 && check_gram_rank1(g).locally ? 1 : 0;
    }
    betas.push_back(beta);
    rates.push_back(static_cast<double>(hits) / static_cast<double>(trials));
  }
  for (std::size_t i = 1; i < betas.size(); ++i) {
    if (rates[i - 1] < 0.5 && rates[i] >= 0.5) {
      const double t = (0.5 - rates[i - 1]) / (rates[i] - rates[i - 1]);
      return betas[i - 1] + t * (betas[i] - betas[i - 1]);
    }
  }
  return std::nan("");
}

HarnessConfig small_config() {
  HarnessConfig cfg;
  cfg.refine_samples = 40;
  return cfg;
}

TEST(Logistic, SeparatedDataClampsAtTheGapMidpoint) {
  const std::vector<double> betas = {0.10, 0.15, 0.20, 0.25, 0.35, 0.40, 0.45, 0.50};
  const std::vector<int> ys = {0, 0, 0, 0, 1, 1, 1, 1};
  const LogisticFit fit = logistic_fit(betas, ys);
  EXPECT_EQ(fit.status, FitStatus::SeparationClamped);
  EXPECT_NEAR(fit.beta_star, 0.3, 0.02);
  EXPECT_EQ(fit.alpha_star, kAlphaCap);
  EXPECT_TRUE(std::isnan(fit.beta_star_se));
}

TEST(Logistic, RecoversSimulatedParameters) {
  Rng rng(5);
  std::vector<double> betas;
  std::vector<int> ys;
  for (int i = 0; i < 500; ++i) {
    const double b = 0.5 * rng.uniform();
    betas.push_back(b);
    ys.push_back(rng.uniform() < 1.0 / (1.0 + std::exp(-80.0 * (b - 0.25))) ? 1 : 0);
  }
  const LogisticFit fit = logistic_fit(betas, ys);
  EXPECT_EQ(fit.status, FitStatus::Converged);
  EXPECT_NEAR(fit.beta_star, 0.25, 0.01);
  EXPECT_NEAR(fit.alpha_star, 80.0, 40.0);
  EXPECT_GT(fit.beta_star_se, 0.0);
  EXPECT_LT(fit.beta_star_se, 0.01);
  for (std::size_t i = 1; i < fit.log_likelihood_trace.size(); ++i) {
    EXPECT_GE(fit.log_likelihood_trace[i], fit.log_likelihood_trace[i - 1]);
  }
}

TEST(Logistic, Errors) {
  const std::vector<double> b = {0.1, 0.2};
  EXPECT_EQ(code_of([&] { logistic_fit(b, std::vector<int>{1, 1}); }), ErrorCode::Separation);
  EXPECT_EQ(code_of([&] { logistic_fit(b, std::vector<int>{0, 0}); }), ErrorCode::Separation);
  EXPECT_EQ(code_of([&] { logistic_fit(b, std::vector<int>{0}); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] { logistic_fit(b, std::vector<int>{0, 2}); }), ErrorCode::InvalidArgument);
  // Outcomes that fall with beta.
  const std::vector<double> bb = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  EXPECT_EQ(code_of([&] { logistic_fit(bb, std::vector<int>{1, 1, 0, 1, 0, 0}); }), ErrorCode::NumericalFailure);
}

TEST(ScalingFit, ExactFreeFit) {
  const auto pts = exact_points(-1.0, 1.0, 0.0);
  const ScalingFit fit = fit_scaling(pts);
  EXPECT_NEAR(fit.a1_plus_2(), 1.0, 1e-10);
  EXPECT_NEAR(fit.a2, 1.0, 1e-8);
  EXPECT_NEAR(fit.a3, 0.0, 1e-8);
  EXPECT_FALSE(fit.a2_fixed);
}

TEST(ScalingFit, FixedExponentRecoversTableValues) {
  const auto pts = exact_points(0.9773 - 2.0, 1.0, 0.5039);
  const ScalingFit fit = fit_scaling(pts, 1.0);
  EXPECT_NEAR(fit.a1_plus_2(), 0.9773, 1e-10);
  EXPECT_NEAR(fit.a3, 0.5039, 1e-9);
  EXPECT_TRUE(fit.a2_fixed);
  EXPECT_EQ(fit.se_a2, 0.0);
}

TEST(ScalingFit, JitterStaysWithinStandardErrors) {
  auto pts = exact_points(1.022 - 2.0, 0.63052, 0.90663);
  Rng rng(12);
  for (auto& p : pts) p.second *= std::exp(0.01 * rng.normal());
  const ScalingFit fit = fit_scaling(pts);
  EXPECT_LE(std::abs(fit.a1 - (1.022 - 2.0)), 3.0 * fit.se_a1 + 1e-12);
  EXPECT_LE(std::abs(fit.a3 - 0.90663), 3.0 * fit.se_a3 + 1e-12);
  const auto j = nlohmann::json::parse(scaling_fit_json(fit));
  EXPECT_EQ(j["points"], pts.size());
}

TEST(ScalingFit, Errors) {
  const std::vector<std::pair<double, double>> two = {{100, 0.1}, {200, 0.05}};
  EXPECT_EQ(code_of([&] { fit_scaling(two); }), ErrorCode::InvalidArgument);
  const std::vector<std::pair<double, double>> same = {{100, 0.1}, {100, 0.11}, {100, 0.09}};
  EXPECT_EQ(code_of([&] { fit_scaling(same); }), ErrorCode::CollinearDesign);
  const std::vector<std::pair<double, double>> bad = {{100, 0.1}, {200, -1.0}};
  EXPECT_EQ(code_of([&] { fit_scaling(bad, 1.0); }), ErrorCode::InvalidArgument);
  const auto exact = fit_scaling(two, 1.0);
  EXPECT_TRUE(std::isnan(exact.se_a1));
  EXPECT_TRUE(nlohmann::json::parse(scaling_fit_json(exact))["se_a1"].is_null());
}

TEST(Trial, EmptyPatternCountsAsFailure) {
  const TrialSample s = run_trial(5, 1, PatternKind::Gram, TestKind::Local, 1e-9, TestConfig{}, 3);
  EXPECT_EQ(s.m, 0u);
  EXPECT_EQ(s.y, 0);
  const TrialSample full = run_trial(5, 1, PatternKind::Gram, TestKind::Local, 1.0, TestConfig{}, 3);
  EXPECT_EQ(full.m, 15u);
  EXPECT_EQ(full.y, 1);
}

TEST(Threshold, DeterministicAndBracketed) {
  const HarnessConfig cfg = small_config();
  const ThresholdEstimate a = estimate_threshold(30, 1, PatternKind::Gram, TestKind::Local, cfg, 9);
  const ThresholdEstimate b = estimate_threshold(30, 1, PatternKind::Gram, TestKind::Local, cfg, 9);
  EXPECT_EQ(a.beta_star, b.beta_star);
  EXPECT_EQ(a.samples(), b.samples());
  EXPECT_LT(a.bracket_low, a.bracket_high);
  EXPECT_GE(a.beta_star, a.bracket_low);
  EXPECT_LE(a.beta_star, a.bracket_high);
  EXPECT_GT(a.alpha_star, 0.0);
}

TEST(Threshold, IndependentOfJobCount) {
  HarnessConfig one = small_config();
  HarnessConfig many = small_config();
  many.jobs = 4;
  const auto a = estimate_threshold(25, 2, PatternKind::Rect, TestKind::Local, one, 4);
  const auto b = estimate_threshold(25, 2, PatternKind::Rect, TestKind::Local, many, 4);
  ASSERT_EQ(a.trials.size(), b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    EXPECT_EQ(a.trials[i].beta, b.trials[i].beta);
    EXPECT_EQ(a.trials[i].y, b.trials[i].y);
  }
  EXPECT_EQ(a.beta_star, b.beta_star);
}

TEST(Threshold, AgreesWithExactRankOneGrid) {
  const double oracle = rank1_grid_threshold(40, 200);
  ASSERT_TRUE(std::isfinite(oracle));
  const auto est = estimate_threshold(40, 1, PatternKind::Gram, TestKind::Local, small_config(), 2024);
  EXPECT_NEAR(est.beta_star, oracle, 0.15 * oracle);
}

TEST(Threshold, DecreasesWithSize) {
  const auto a = estimate_threshold(100, 1, PatternKind::Gram, TestKind::Local, small_config(), 1);
  const auto b = estimate_threshold(200, 1, PatternKind::Gram, TestKind::Local, small_config(), 1);
  EXPECT_LT(b.beta_star, a.beta_star);
}

TEST(Threshold, Errors) {
  const HarnessConfig cfg;
  EXPECT_EQ(code_of([&] { estimate_threshold(3, 4, PatternKind::Gram, TestKind::Local, cfg, 1); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { estimate_threshold(10, 1, PatternKind::Gram, TestKind::Local, cfg, 1, 1.5); }),
            ErrorCode::InvalidArgument);
  HarnessConfig bad;
  bad.descent_factor = 1.0;
  EXPECT_EQ(code_of([&] { estimate_threshold(10, 1, PatternKind::Gram, TestKind::Local, bad, 1); }),
            ErrorCode::InvalidArgument);
}

TEST(Sweep, EmptyListWritesHeaderOnly) {
  const auto rows = sweep({}, 1, PatternKind::Gram, TestKind::Local, HarnessConfig{}, 1);
  EXPECT_TRUE(rows.empty());
  std::ostringstream out;
  write_sweep_csv(out, rows);
  EXPECT_EQ(out.str(),
            "# schema=1\nn,d,kind,test,beta_star,alpha_star,beta_star_n_over_dlogn,samples,status,wall_secs\n");
}

TEST(Sweep, CsvRoundTrip) {
  const std::vector<std::size_t> ns = {30, 60};
  const auto rows = sweep(ns, 1, PatternKind::Gram, TestKind::Local, small_config(), 3);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0].normalized, rows[0].beta_star * 30 / std::log(30.0), 1e-12);
  std::stringstream io;
  write_sweep_csv(io, rows);
  const auto back = read_sweep_csv(io);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].n, rows[i].n);
    EXPECT_EQ(back[i].kind, rows[i].kind);
    EXPECT_EQ(back[i].status, rows[i].status);
    EXPECT_EQ(back[i].samples, rows[i].samples);
    EXPECT_NEAR(back[i].beta_star, rows[i].beta_star, 1e-9 * rows[i].beta_star);
  }
  std::istringstream bad("n,d\n1,2\n");
  EXPECT_EQ(code_of([&] { read_sweep_csv(bad); }), ErrorCode::Parse);
}

TEST(Bench, RowsFollowMultipliers) {
  const std::vector<std::size_t> sizes = {40};
  const auto rows = bench(sizes, 2, PatternKind::Rect, TestKind::Local, HarnessConfig{}, 5, 0.3);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].multiplier, 0.75);
  EXPECT_EQ(rows[2].multiplier, 2.0);
  EXPECT_NEAR(rows[1].beta, 0.3, 1e-15);
  EXPECT_LT(rows[0].m, rows[2].m);
  EXPECT_TRUE(rows[2].completable);
  std::ostringstream out;
  write_bench_csv(out, rows);
  EXPECT_NE(out.str().find("n,d,kind,test,beta_multiplier,m,completable,wall_secs\n"), std::string::npos);

  const auto global = bench(sizes, 1, PatternKind::Rect, TestKind::Global, HarnessConfig{}, 5, 0.3);
  EXPECT_EQ(global[0].multiplier, 0.8);
}

TEST(Bench, GlobalLowerMultiplier) {
  EXPECT_EQ(global_bench_lower_multiplier(101), 0.8);
  EXPECT_EQ(global_bench_lower_multiplier(1002), 0.9);
  EXPECT_EQ(global_bench_lower_multiplier(5000), 0.91);
  EXPECT_EQ(global_bench_lower_multiplier(10000), 0.92);
}

}  // namespace
}  // namespace unicomp
