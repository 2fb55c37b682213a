#include "unicomp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <Eigen/Dense>
#include <json.hpp>

#include "unicomp/error.hpp"

namespace unicomp {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMaxNewtonSteps = 200;
constexpr int kMaxHalvings = 60;

// Sub-stream ids of one threshold estimate.
enum Stream : std::uint64_t {
  kDescent = 1,
  kRefineBetas = 2,
  kRefineTrials = 3,
  kRetry = 4,
};

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_likelihood(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double a, double b) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double eta = a + b * x[i];
    ll += y[i] * eta - softplus(eta);
  }
  return ll;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

nlohmann::ordered_json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double normalized_threshold(double beta_star, std::size_t n, std::size_t d) {
  if (n < 2) return kNaN;
  const double dn = static_cast<double>(n);
  return beta_star * dn / (static_cast<double>(d) * std::log(dn));
}

void validate_problem(std::size_t n, std::size_t d) {
  if (d < 1) raise(ErrorCode::InvalidArgument, "rank d must be at least 1");
  if (n < d) raise(ErrorCode::InvalidArgument, "n must be at least d");
}

void validate_harness(const HarnessConfig& cfg) {
  cfg.test.validate();
  if (!(cfg.descent_factor > 0.0 && cfg.descent_factor < 1.0)) {
    raise(ErrorCode::InvalidArgument, "descent factor must lie in (0, 1)");
  }
  if (cfg.consecutive_failures < 1) raise(ErrorCode::InvalidArgument, "consecutive failures must be >= 1");
  if (cfg.max_descent_steps < 1) raise(ErrorCode::InvalidArgument, "max descent steps must be >= 1");
  if (!(cfg.alpha_cap > 0.0)) raise(ErrorCode::InvalidArgument, "alpha cap must be positive");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t lineno) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    raise(ErrorCode::Parse, "line " + std::to_string(lineno) + ": bad number '" + s + "'");
  }
}

std::size_t parse_size(const std::string& s, std::size_t lineno) {
  const double v = parse_double(s, lineno);
  if (!(v >= 0.0) || v != std::floor(v)) {
    raise(ErrorCode::Parse, "line " + std::to_string(lineno) + ": bad count '" + s + "'");
  }
  return static_cast<std::size_t>(v);
}

// Runs trials[k] for every k on up to `jobs` threads.
void run_parallel(std::vector<TrialSample>& trials, std::size_t jobs,
                  const std::function<TrialSample(std::size_t)>& task) {
  const std::size_t count = trials.size();
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t k = 0; k < count; ++k) trials[k] = task(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          trials[k] = task(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

const char* to_string(FitStatus s) noexcept {
  return s == FitStatus::Converged ? "converged" : "separation-clamped";
}

LogisticFit logistic_fit(std::span<const double> betas, std::span<const int> ys, double alpha_cap) {
  if (betas.size() != ys.size()) raise(ErrorCode::DimensionMismatch, "betas and outcomes differ in length");
  if (betas.empty()) raise(ErrorCode::InvalidArgument, "logistic fit needs samples");
  if (!(alpha_cap > 0.0)) raise(ErrorCode::InvalidArgument, "alpha cap must be positive");
  double max0 = -std::numeric_limits<double>::infinity();
  double min1 = std::numeric_limits<double>::infinity();
  std::size_t ones = 0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!std::isfinite(betas[i])) raise(ErrorCode::NonFinite, "beta must be finite");
    if (ys[i] != 0 && ys[i] != 1) raise(ErrorCode::InvalidArgument, "outcomes must be 0 or 1");
    if (ys[i] == 1) {
      ++ones;
      min1 = std::min(min1, betas[i]);
    } else {
      max0 = std::max(max0, betas[i]);
    }
  }
  if (ones == 0 || ones == betas.size()) raise(ErrorCode::Separation, "all outcomes are equal");

  const auto count = static_cast<Eigen::Index>(betas.size());
  Eigen::VectorXd raw(count), y(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    raw[i] = betas[static_cast<std::size_t>(i)];
    y[i] = ys[static_cast<std::size_t>(i)];
  }
  const double mean = raw.mean();
  double scale = std::sqrt((raw.array() - mean).square().mean());
  if (!(scale > 0.0)) scale = 1.0;
  const Eigen::VectorXd x = (raw.array() - mean) / scale;

  LogisticFit fit;
  if (max0 <= min1) {
    fit.status = FitStatus::SeparationClamped;
    fit.beta_star = 0.5 * (max0 + min1);
    fit.alpha_star = alpha_cap;
    fit.beta_star_se = kNaN;
    fit.log_likelihood_trace.push_back(
        log_likelihood(x, y, alpha_cap * (mean - fit.beta_star), alpha_cap * scale));
    return fit;
  }

  double a = 0.0, b = 0.0;
  double ll = log_likelihood(x, y, a, b);
  fit.log_likelihood_trace.push_back(ll);
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  for (std::size_t it = 0; it < kMaxNewtonSteps; ++it) {
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    h.setZero();
    for (Eigen::Index i = 0; i < count; ++i) {
      const double p = sigmoid(a + b * x[i]);
      const double w = p * (1.0 - p);
      g += (y[i] - p) * Eigen::Vector2d(1.0, x[i]);
      h(0, 0) += w;
      h(0, 1) += w * x[i];
      h(1, 1) += w * x[i] * x[i];
    }
    h(1, 0) = h(0, 1);
    const Eigen::Vector2d step = h.ldlt().solve(g);
    if (!step.allFinite()) raise(ErrorCode::NumericalFailure, "logistic fit: singular information matrix");

    double t = 1.0;
    double next_ll = ll;
    int halvings = 0;
    for (; halvings < kMaxHalvings; ++halvings, t *= 0.5) {
      next_ll = log_likelihood(x, y, a + t * step[0], b + t * step[1]);
      if (next_ll >= ll) break;
    }
    if (halvings == kMaxHalvings) break;
    a += t * step[0];
    b += t * step[1];
    const double gain = next_ll - ll;
    ll = next_ll;
    fit.log_likelihood_trace.push_back(ll);
    fit.iterations = it + 1;
    if (gain <= 1e-12 * (1.0 + std::abs(ll)) && t * step.norm() <= 1e-10 * (1.0 + std::abs(b))) break;
  }

  if (!(b > 0.0)) {
    raise(ErrorCode::NumericalFailure, "logistic fit: completability does not increase with beta");
  }
  fit.alpha_star = b / scale;
  fit.beta_star = mean - scale * a / b;
  if (fit.alpha_star > alpha_cap) {
    fit.alpha_star = alpha_cap;
    fit.status = FitStatus::SeparationClamped;
    fit.beta_star_se = kNaN;
    return fit;
  }
  // Delta method: beta* = mean - scale a / b.
  const Eigen::Vector2d grad(-scale / b, scale * a / (b * b));
  const Eigen::Matrix2d cov = h.inverse();
  fit.beta_star_se = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
  return fit;
}

LogisticFit logistic_fit(std::span<const TrialSample> samples, double alpha_cap) {
  std::vector<double> betas;
  std::vector<int> ys;
  betas.reserve(samples.size());
  ys.reserve(samples.size());
  for (const auto& s : samples) {
    betas.push_back(s.beta);
    ys.push_back(s.y);
  }
  return logistic_fit(betas, ys, alpha_cap);
}

TrialSample run_trial(std::size_t n, std::size_t d, PatternKind kind, TestKind test, double beta,
                      const TestConfig& cfg, std::uint64_t seed) {
  TrialSample s;
  s.beta = beta;
  s.n = n;
  s.d = d;
  s.kind = kind;
  s.test = test;
  s.seed = seed;
  const std::uint64_t pattern_seed = derive_seed(seed, {0});
  const Pattern pattern = kind == PatternKind::Gram ? Pattern(sample_gram(n, beta, pattern_seed))
                                                    : Pattern(sample_rect(n, n, beta, pattern_seed));
  s.m = edge_count(pattern);
  if (s.m == 0) return s;
  TestConfig trial_cfg = cfg;
  trial_cfg.seed = derive_seed(seed, {1});
  s.y = run_test(pattern, test, d, trial_cfg).completable ? 1 : 0;
  return s;
}

ThresholdEstimate estimate_threshold(std::size_t n, std::size_t d, PatternKind kind, TestKind test,
                                     const HarnessConfig& cfg, std::uint64_t seed,
                                     std::optional<double> beta_upper) {
  const auto t0 = Clock::now();
  validate_problem(n, d);
  validate_harness(cfg);
  double upper = beta_upper.value_or(1.0);
  if (!(upper > 0.0 && upper <= 1.0)) raise(ErrorCode::InvalidArgument, "upper beta must lie in (0, 1]");

  ThresholdEstimate est;
  std::uint64_t descent_seed = derive_seed(seed, {kDescent});
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  for (int attempt = 0;; ++attempt) {
    double beta = upper;
    std::size_t run = 0;
    bool seen_success = false;
    bool seen_failure = false;
    double last_success = upper;
    bracket_high = upper;
    for (std::size_t step = 0; step < cfg.max_descent_steps && run < cfg.consecutive_failures; ++step) {
      const TrialSample s = run_trial(n, d, kind, test, beta, cfg.test, derive_seed(descent_seed, {step}));
      est.trials.push_back(s);
      if (s.y == 1) {
        seen_success = true;
        last_success = beta;
        run = 0;
      } else {
        if (!seen_failure) bracket_high = seen_success ? last_success : upper;
        seen_failure = true;
        bracket_low = beta;
        ++run;
      }
      beta *= cfg.descent_factor;
    }
    if (seen_success && seen_failure) break;
    if (attempt == 0 && upper < 1.0) {
      // Every trial agreed: restart from the trivial upper bound.
      upper = 1.0;
      descent_seed = derive_seed(seed, {kRetry});
      continue;
    }
    raise(ErrorCode::DegenerateBracket,
          seen_success ? "descent never produced a failure" : "descent never produced a success");
  }
  est.bracket_low = bracket_low;
  est.bracket_high = bracket_high;

  std::vector<double> betas(cfg.refine_samples);
  Rng beta_rng(derive_seed(seed, {kRefineBetas}));
  for (double& b : betas) b = bracket_low + (bracket_high - bracket_low) * beta_rng.uniform();
  std::vector<TrialSample> refine(cfg.refine_samples);
  run_parallel(refine, cfg.jobs, [&](std::size_t k) {
    return run_trial(n, d, kind, test, betas[k], cfg.test, derive_seed(seed, {kRefineTrials, k}));
  });
  est.trials.insert(est.trials.end(), refine.begin(), refine.end());

  const LogisticFit fit = logistic_fit(est.trials, cfg.alpha_cap);
  est.beta_star = fit.beta_star;
  est.alpha_star = fit.alpha_star;
  est.beta_star_se = fit.beta_star_se;
  est.status = fit.status;
  est.ci_low = fit.beta_star - 1.96 * fit.beta_star_se;
  est.ci_high = fit.beta_star + 1.96 * fit.beta_star_se;
  est.wall_secs = std::chrono::duration<double>(Clock::now() - t0).count();
  return est;
}

ScalingFit fit_scaling(std::span<const std::pair<double, double>> points, std::optional<double> fixed_a2) {
  const std::size_t params = fixed_a2 ? 2 : 3;
  if (points.size() < params) {
    raise(ErrorCode::InvalidArgument, "scaling fit needs at least " + std::to_string(params) + " points");
  }
  const auto rows = static_cast<Eigen::Index>(points.size());
  const auto cols = static_cast<Eigen::Index>(params);
  Eigen::MatrixXd x(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto [n, beta] = points[static_cast<std::size_t>(i)];
    if (!(n > 1.0) || !std::isfinite(n)) raise(ErrorCode::InvalidArgument, "n must exceed 1");
    if (!(beta > 0.0) || !std::isfinite(beta)) raise(ErrorCode::InvalidArgument, "beta_star must be positive");
    const double ln = std::log(n);
    const double lln = std::log(ln);
    y[i] = std::log(beta);
    if (fixed_a2) {
      x.row(i) << ln, 1.0;
      y[i] -= *fixed_a2 * lln;
    } else {
      x.row(i) << ln, lln, 1.0;
    }
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-10 * sv(0)) raise(ErrorCode::CollinearDesign, "design matrix is collinear");
  const Eigen::VectorXd coef = svd.solve(y);
  const Eigen::VectorXd resid = y - x * coef;

  const std::size_t dof = points.size() - params;
  const double sigma2 = dof > 0 ? resid.squaredNorm() / static_cast<double>(dof) : kNaN;
  const Eigen::MatrixXd v = svd.matrixV();
  const Eigen::MatrixXd xtx_inv = v * sv.array().square().inverse().matrix().asDiagonal() * v.transpose();
  auto se = [&](Eigen::Index k) { return std::sqrt(sigma2 * xtx_inv(k, k)); };

  ScalingFit fit;
  fit.residuals.assign(resid.data(), resid.data() + resid.size());
  fit.a1 = coef[0];
  fit.se_a1 = se(0);
  if (fixed_a2) {
    fit.a2 = *fixed_a2;
    fit.a2_fixed = true;
    fit.a3 = coef[1];
    fit.se_a3 = se(1);
  } else {
    fit.a2 = coef[1];
    fit.se_a2 = se(1);
    fit.a3 = coef[2];
    fit.se_a3 = se(2);
  }
  return fit;
}

std::string scaling_fit_json(const ScalingFit& fit) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["a1"] = fit.a1;
  j["a1_plus_2"] = fit.a1_plus_2();
  j["a2"] = fit.a2;
  j["a3"] = fit.a3;
  j["se_a1"] = finite_or_null(fit.se_a1);
  j["se_a2"] = finite_or_null(fit.se_a2);
  j["se_a3"] = finite_or_null(fit.se_a3);
  j["a2_fixed"] = fit.a2_fixed;
  j["points"] = fit.residuals.size();
  j["residuals"] = fit.residuals;
  return j.dump();
}

std::vector<SweepRow> sweep(std::span<const std::size_t> n_list, std::size_t d, PatternKind kind,
                            TestKind test, const HarnessConfig& cfg, std::uint64_t seed) {
  std::vector<SweepRow> rows;
  std::optional<double> upper;
  std::size_t prev_n = 0;
  for (std::size_t n : n_list) {
    if (n <= prev_n) upper.reset();
    const ThresholdEstimate est = estimate_threshold(n, d, kind, test, cfg, derive_seed(seed, {n}), upper);
    SweepRow row;
    row.n = n;
    row.d = d;
    row.kind = kind;
    row.test = test;
    row.beta_star = est.beta_star;
    row.alpha_star = est.alpha_star;
    row.normalized = normalized_threshold(est.beta_star, n, d);
    row.samples = est.samples();
    row.status = est.status;
    row.wall_secs = est.wall_secs;
    rows.push_back(row);
    upper = std::clamp(est.beta_star, std::numeric_limits<double>::min(), 1.0);
    prev_n = n;
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "# schema=1\n";
  out << "n,d,kind,test,beta_star,alpha_star,beta_star_n_over_dlogn,samples,status,wall_secs\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.d << ',' << to_string(r.kind) << ',' << to_string(r.test) << ','
        << format_double(r.beta_star) << ',' << format_double(r.alpha_star) << ','
        << format_double(r.normalized) << ',' << r.samples << ',' << to_string(r.status) << ','
        << format_double(r.wall_secs) << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  static const std::vector<std::string> header = {
      "n", "d", "kind", "test", "beta_star", "alpha_star", "beta_star_n_over_dlogn", "samples", "status", "wall_secs"};
  std::vector<SweepRow> rows;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> f = split_csv(line);
    if (!have_header) {
      if (f != header) raise(ErrorCode::Parse, "line " + std::to_string(lineno) + ": unexpected sweep header");
      have_header = true;
      continue;
    }
    if (f.size() != header.size()) {
      raise(ErrorCode::Parse, "line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(header.size()) + " fields");
    }
    SweepRow r;
    r.n = parse_size(f[0], lineno);
    r.d = parse_size(f[1], lineno);
    if (f[2] == "gram") {
      r.kind = PatternKind::Gram;
    } else if (f[2] == "rect") {
      r.kind = PatternKind::Rect;
    } else {
      raise(ErrorCode::Parse, "line " + std::to_string(lineno) + ": unknown kind '" + f[2] + "'");
    }
    if (f[3] == "local") {
      r.test = TestKind::Local;
    } else if (f[3] == "global") {
      r.test = TestKind::Global;
    } else {
      raise(ErrorCode::Parse, "line " + std::to_string(lineno) + ": unknown test '" + f[3] + "'");
    }
    r.beta_star = parse_double(f[4], lineno);
    r.alpha_star = parse_double(f[5], lineno);
    r.normalized = parse_double(f[6], lineno);
    r.samples = parse_size(f[7], lineno);
    if (f[8] == "converged") {
      r.status = FitStatus::Converged;
    } else if (f[8] == "separation-clamped") {
      r.status = FitStatus::SeparationClamped;
    } else {
      raise(ErrorCode::Parse, "line " + std::to_string(lineno) + ": unknown status '" + f[8] + "'");
    }
    r.wall_secs = parse_double(f[9], lineno);
    rows.push_back(r);
  }
  if (!have_header) raise(ErrorCode::Parse, "missing sweep header");
  return rows;
}

double global_bench_lower_multiplier(std::size_t n) noexcept {
  if (n <= 500) return 0.8;
  if (n <= 2600) return 0.9;
  if (n <= 5100) return 0.91;
  return 0.92;
}

std::vector<BenchRow> bench(std::span<const std::size_t> sizes, std::size_t d, PatternKind kind,
                            TestKind test, const HarnessConfig& cfg, std::uint64_t seed,
                            std::optional<double> beta_star, std::span<const double> multipliers) {
  if (beta_star && !(*beta_star > 0.0 && *beta_star <= 1.0)) {
    raise(ErrorCode::InvalidArgument, "beta_star must lie in (0, 1]");
  }
  for (double mu : multipliers) {
    if (!(mu > 0.0) || !std::isfinite(mu)) raise(ErrorCode::InvalidArgument, "multipliers must be positive");
  }
  std::vector<BenchRow> rows;
  for (std::size_t n : sizes) {
    validate_problem(n, d);
    const double bs = beta_star ? *beta_star
                                : estimate_threshold(n, d, kind, test, cfg, derive_seed(seed, {0, n})).beta_star;
    std::vector<double> mults(multipliers.begin(), multipliers.end());
    if (mults.empty()) {
      mults = {test == TestKind::Local ? 0.75 : global_bench_lower_multiplier(n), 1.0, 2.0};
    }
    for (std::size_t k = 0; k < mults.size(); ++k) {
      BenchRow row;
      row.n = n;
      row.d = d;
      row.kind = kind;
      row.test = test;
      row.multiplier = mults[k];
      row.beta = std::min(1.0, mults[k] * bs);
      const std::uint64_t pattern_seed = derive_seed(seed, {1, n, k});
      const Pattern pattern = kind == PatternKind::Gram ? Pattern(sample_gram(n, row.beta, pattern_seed))
                                                        : Pattern(sample_rect(n, n, row.beta, pattern_seed));
      row.m = edge_count(pattern);
      if (row.m > 0) {
        TestConfig tc = cfg.test;
        tc.seed = derive_seed(seed, {2, n, k});
        const auto t0 = Clock::now();
        row.completable = run_test(pattern, test, d, tc).completable;
        row.wall_secs = std::chrono::duration<double>(Clock::now() - t0).count();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << "# schema=1\n";
  out << "n,d,kind,test,beta_multiplier,m,completable,wall_secs\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.d << ',' << to_string(r.kind) << ',' << to_string(r.test) << ','
        << format_double(r.multiplier) << ',' << r.m << ',' << (r.completable ? 1 : 0) << ','
        << format_double(r.wall_secs) << '\n';
  }
}

}  // namespace unicomp
