#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "unicomp/pattern.hpp"
#include "unicomp/verdict.hpp"

namespace unicomp {

struct TrialSample {
  double beta = 0.0;
  int y = 0;  // 1 = completable
  std::size_t n = 0;
  std::size_t d = 0;
  PatternKind kind = PatternKind::Gram;
  TestKind test = TestKind::Local;
  std::uint64_t seed = 0;
  std::size_t m = 0;
};

enum class FitStatus { Converged, SeparationClamped };

const char* to_string(FitStatus s) noexcept;

/// Pr{y = 1 | beta} = 1 / (1 + exp(-alpha (beta - beta_star))).
struct LogisticFit {
  double beta_star = 0.0;
  double alpha_star = 0.0;
  /// Observed-information standard error of beta_star (NaN when clamped).
  double beta_star_se = 0.0;
  FitStatus status = FitStatus::Converged;
  std::size_t iterations = 0;
  std::vector<double> log_likelihood_trace;
};

inline constexpr double kAlphaCap = 1e4;

/// Maximum likelihood by damped Newton (IRLS). Perfectly separated data put
/// beta_star at the midpoint of the separating gap with alpha clamped at
/// alpha_cap. Throws Separation when all outcomes are equal.
LogisticFit logistic_fit(std::span<const double> betas, std::span<const int> ys,
                         double alpha_cap = kAlphaCap);
LogisticFit logistic_fit(std::span<const TrialSample> samples, double alpha_cap = kAlphaCap);

struct HarnessConfig {
  TestConfig test;
  double descent_factor = 0.95;
  std::size_t consecutive_failures = 20;
  std::size_t refine_samples = 40;
  std::size_t max_descent_steps = 1000;
  double alpha_cap = kAlphaCap;
  /// Concurrent trials during bracket refinement. Results do not depend on it.
  std::size_t jobs = 1;
};

struct ThresholdEstimate {
  double beta_star = 0.0;
  double alpha_star = 0.0;
  double beta_star_se = 0.0;
  double ci_low = 0.0;  // 95% interval from the standard error
  double ci_high = 0.0;
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  FitStatus status = FitStatus::Converged;
  std::vector<TrialSample> trials;
  double wall_secs = 0.0;

  std::size_t samples() const noexcept { return trials.size(); }
};

/// One random pattern at probability beta (n1 = n2 = n for rectangular),
/// tested once. Patterns without edges count as not completable.
TrialSample run_trial(std::size_t n, std::size_t d, PatternKind kind, TestKind test, double beta,
                      const TestConfig& cfg, std::uint64_t seed);

/// Multiplicative descent from beta_upper (default 1) until
/// consecutive_failures failures in a row, uniform refinement of the
/// bracket, then a logistic fit over all samples.
ThresholdEstimate estimate_threshold(std::size_t n, std::size_t d, PatternKind kind,
                                     TestKind test, const HarnessConfig& cfg,
                                     std::uint64_t seed,
                                     std::optional<double> beta_upper = std::nullopt);

/// log beta* = a1 log n + a2 log log n + a3 by ordinary least squares.
struct ScalingFit {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double se_a1 = 0.0;
  double se_a2 = 0.0;  // 0 when a2 is fixed
  double se_a3 = 0.0;
  bool a2_fixed = false;
  std::vector<double> residuals;

  double a1_plus_2() const noexcept { return a1 + 2.0; }
};

/// points are (n, beta_star). With fixed_a2 the a2 column moves to the
/// left-hand side. Throws InvalidArgument for too few points and
/// CollinearDesign for a singular design.
ScalingFit fit_scaling(std::span<const std::pair<double, double>> points,
                       std::optional<double> fixed_a2 = std::nullopt);
std::string scaling_fit_json(const ScalingFit& fit);

struct SweepRow {
  std::size_t n = 0;
  std::size_t d = 0;
  PatternKind kind = PatternKind::Gram;
  TestKind test = TestKind::Local;
  double beta_star = 0.0;
  double alpha_star = 0.0;
  double normalized = 0.0;  // beta_star * n / (d log n)
  std::size_t samples = 0;
  FitStatus status = FitStatus::Converged;
  double wall_secs = 0.0;
};

/// Threshold per n, each estimate seeding the next descent.
std::vector<SweepRow> sweep(std::span<const std::size_t> n_list, std::size_t d, PatternKind kind,
                            TestKind test, const HarnessConfig& cfg, std::uint64_t seed);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

struct BenchRow {
  std::size_t n = 0;
  std::size_t d = 0;
  PatternKind kind = PatternKind::Rect;
  TestKind test = TestKind::Local;
  double multiplier = 0.0;
  double beta = 0.0;
  std::size_t m = 0;
  bool completable = false;
  double wall_secs = 0.0;
};

/// Lower multiplier used for the global timing column at size n.
double global_bench_lower_multiplier(std::size_t n) noexcept;

/// Times the verdict at beta = multiplier * beta_star for each size. Default
/// multipliers: {0.75, 1, 2} (local) or {global_bench_lower_multiplier(n), 1, 2}.
/// beta_star is estimated per size when not supplied.
std::vector<BenchRow> bench(std::span<const std::size_t> sizes, std::size_t d, PatternKind kind,
                            TestKind test, const HarnessConfig& cfg, std::uint64_t seed,
                            std::optional<double> beta_star = std::nullopt,
                            std::span<const double> multipliers = {});

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);

}  // namespace unicomp
