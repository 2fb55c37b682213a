#include "unicomp/verdict.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include <json.hpp>

#include "unicomp/error.hpp"

namespace unicomp {

namespace {

using Clock = std::chrono::steady_clock;

// Sub-stream ids for the randomized steps of one verdict.
enum Stream : std::uint64_t {
  kLocalRealization = 1,
  kLocalProbe = 2,
  kGlobalRealization = 3,
  kGlobalStress = 4,
  kGlobalProbe = 5,
};

constexpr double kStressRelTol = 1e-12;
constexpr double kProbeNormalTol = 1e-10;
constexpr double kVacuousStress = 1e-8;
constexpr int kStressRefinements = 4;

void require_rank_fits(const Pattern& pattern, std::size_t d) {
  if (d < 1) raise(ErrorCode::InvalidArgument, "rank d must be at least 1");
  if (const auto* g = std::get_if<GramPattern>(&pattern)) {
    if (g->n() < d) raise(ErrorCode::InvalidArgument, "rank d exceeds the matrix dimension n");
  } else {
    const auto& r = std::get<RectPattern>(pattern);
    if (std::min(r.n1(), r.n2()) < d) {
      raise(ErrorCode::InvalidArgument, "rank d exceeds min(n1, n2)");
    }
  }
}

Verdict blank_verdict(const Pattern& pattern, TestKind test, std::size_t d, const TestConfig& cfg) {
  Verdict v;
  v.test = test;
  v.kind = kind_of(pattern);
  v.d = d;
  if (const auto* g = std::get_if<GramPattern>(&pattern)) {
    v.n1 = g->n();
  } else {
    const auto& r = std::get<RectPattern>(pattern);
    v.n1 = r.n1();
    v.n2 = r.n2();
  }
  v.m = edge_count(pattern);
  v.trivial_dim = trivial_dimension(v.kind, d);
  v.tolerance = cfg.epsilon / std::sqrt(static_cast<double>(vertex_count(pattern)));
  return v;
}

std::size_t iteration_cap(const TestConfig& cfg, std::size_t rows, std::size_t cols) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(
                                      std::ceil(cfg.lsqr_iter_factor * static_cast<double>(rows + cols))));
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

const char* to_string(TestKind t) noexcept { return t == TestKind::Local ? "local" : "global"; }

void TestConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) raise(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (repeats < 1) raise(ErrorCode::InvalidArgument, "repeat count must be at least 1");
  if (!(lsqr_iter_factor > 0.0) || !std::isfinite(lsqr_iter_factor)) {
    raise(ErrorCode::InvalidArgument, "lsqr iteration factor must be positive");
  }
}

double Verdict::residual() const noexcept {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

ProbeResult null_space_probe(const SparseMatrix& m, const DenseMatrix& known_kernel,
                             const TestConfig& cfg, std::size_t vertex_count, std::uint64_t seed) {
  cfg.validate();
  if (static_cast<std::size_t>(known_kernel.rows()) != m.cols()) {
    raise(ErrorCode::DimensionMismatch, "known kernel basis has the wrong row count");
  }
  if (vertex_count == 0) raise(ErrorCode::InvalidArgument, "vertex count must be positive");
  ProbeResult out;
  // The known kernel already fills the space: nothing else can hide there.
  if (known_kernel.cols() >= known_kernel.rows()) return out;

  const DenseMatrix q = orthonormal_basis(known_kernel);
  const double tol = cfg.epsilon / std::sqrt(static_cast<double>(vertex_count));
  Rng rng(seed);
  const TransposedOperator mt(m);
  LsqrOptions opt;
  opt.tol = tol;
  opt.normal_tol = kProbeNormalTol;
  opt.max_iter = iteration_cap(cfg, m.rows(), m.cols());

  for (std::size_t k = 0; k < cfg.repeats; ++k) {
    const Vector b = random_unit_in_complement(q, rng);
    const LsqrResult res = lsqr(mt, b, opt);
    out.residuals.push_back(res.residual_norm);
    out.iterations += res.iterations;
    out.residual = std::max(out.residual, res.residual_norm);
    if (res.residual_norm > tol) {
      out.has_nontrivial_kernel = true;
      out.residual_floor = res.status != LsqrStatus::Converged;
      break;
    }
  }
  return out;
}

StressResult random_stress(const SparseMatrix& c, std::uint64_t seed, double rel_tol) {
  Rng rng(seed);
  StressResult out;
  out.initial.resize(static_cast<Eigen::Index>(c.rows()));
  for (Eigen::Index i = 0; i < out.initial.size(); ++i) out.initial[i] = rng.normal();
  out.weights = out.initial;
  if (c.rows() == 0) return out;

  const TransposedOperator ct(c);
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(c.cols()));
  LsqrOptions opt;
  opt.tol = rel_tol * out.initial.norm();
  opt.normal_tol = 0.0;
  for (int round = 0; round < kStressRefinements; ++round) {
    opt.x0 = out.weights;
    const LsqrResult res = lsqr(ct, zero, opt);
    out.weights = res.x;
    out.residual = res.residual_norm;
    out.iterations += res.iterations;
    if (res.residual_norm <= opt.tol) break;
  }
  return out;
}

Verdict test_local(const Pattern& pattern, std::size_t d, const TestConfig& cfg) {
  const auto t0 = Clock::now();
  cfg.validate();
  require_rank_fits(pattern, d);
  Verdict v = blank_verdict(pattern, TestKind::Local, d, cfg);
  if (v.m == 0) raise(ErrorCode::DegeneratePattern, "pattern has no observed entries");

  const std::size_t vertices = vertex_count(pattern);
  if (v.m + v.trivial_dim < d * vertices) {
    v.completable = false;
    v.flags |= kCountShortfall;
    v.wall_secs = seconds_since(t0);
    return v;
  }

  const Realization r = random_realization(pattern, d, derive_seed(cfg.seed, {kLocalRealization}));
  const SparseMatrix c = completion_matrix(pattern, r);
  const TrivialMotionBasis trivial = trivial_basis(r);
  const ProbeResult probe =
      null_space_probe(c, trivial.motions, cfg, vertices, derive_seed(cfg.seed, {kLocalProbe}));

  v.completable = !probe.has_nontrivial_kernel;
  v.residuals = probe.residuals;
  v.lsqr_iterations = probe.iterations;
  if (probe.residual_floor) v.flags |= kResidualFloor;
  v.wall_secs = seconds_since(t0);
  return v;
}

Verdict test_global(const Pattern& pattern, std::size_t d, const TestConfig& cfg) {
  const auto t0 = Clock::now();
  Verdict v = test_local(pattern, d, cfg);
  v.test = TestKind::Global;
  if (!v.completable) {
    v.wall_secs = seconds_since(t0);
    return v;
  }

  const std::size_t vertices = vertex_count(pattern);
  const Realization r = random_realization(pattern, d, derive_seed(cfg.seed, {kGlobalRealization}));
  const SparseMatrix c = completion_matrix(pattern, r);
  const StressResult stress = random_stress(c, derive_seed(cfg.seed, {kGlobalStress}), kStressRelTol);
  const double w0 = stress.initial.norm();
  v.stress_residual = stress.residual / w0;
  v.lsqr_iterations += stress.iterations;

  if (stress.weights.norm() <= kVacuousStress * w0) {
    v.completable = false;
    v.flags |= kStressVacuous;
    v.wall_secs = seconds_since(t0);
    return v;
  }

  const StressMatrix omega = assemble_stress(pattern, stress.weights);
  const DenseMatrix kernel = stress_kernel_basis(r);
  const ProbeResult probe =
      null_space_probe(omega.matrix, kernel, cfg, vertices, derive_seed(cfg.seed, {kGlobalProbe}));
  v.completable = !probe.has_nontrivial_kernel;
  v.residuals.insert(v.residuals.end(), probe.residuals.begin(), probe.residuals.end());
  v.lsqr_iterations += probe.iterations;
  if (probe.residual_floor) v.flags |= kResidualFloor;
  v.wall_secs = seconds_since(t0);
  return v;
}

Verdict run_test(const Pattern& pattern, TestKind test, std::size_t d, const TestConfig& cfg) {
  return test == TestKind::Local ? test_local(pattern, d, cfg) : test_global(pattern, d, cfg);
}

std::vector<std::string> flag_names(unsigned flags) {
  std::vector<std::string> out;
  if (flags & kCountShortfall) out.emplace_back("count-shortfall");
  if (flags & kResidualFloor) out.emplace_back("residual-floor");
  if (flags & kStressVacuous) out.emplace_back("minimal-pattern-stress-vacuous");
  return out;
}

std::string verdict_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["kind"] = to_string(v.kind);
  j["test"] = to_string(v.test);
  j["d"] = v.d;
  if (v.kind == PatternKind::Gram) {
    j["n"] = v.n1;
  } else {
    j["n1"] = v.n1;
    j["n2"] = v.n2;
  }
  j["m"] = v.m;
  j["completable"] = v.completable;
  j["trivial_dim"] = v.trivial_dim;
  if (v.residuals.empty()) {
    j["residual"] = nullptr;
  } else {
    j["residual"] = v.residual();
  }
  j["residuals"] = v.residuals;
  j["tolerance"] = v.tolerance;
  if (v.stress_residual) j["stress_residual"] = *v.stress_residual;
  j["lsqr_iterations"] = v.lsqr_iterations;
  j["flags"] = flag_names(v.flags);
  j["timings"] = {{"wall_secs", v.wall_secs}};
  return j.dump();
}

}  // namespace unicomp
