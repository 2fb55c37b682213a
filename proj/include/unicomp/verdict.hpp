#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unicomp/completion.hpp"
#include "unicomp/numkit.hpp"
#include "unicomp/pattern.hpp"
#include "unicomp/rng.hpp"

namespace unicomp {

enum class TestKind { Local, Global };

const char* to_string(TestKind t) noexcept;

struct TestConfig {
  /// LSQR tolerance is epsilon / sqrt(#vertices). One probe misses a
  /// nontrivial kernel vector with probability at most 2 eps / sqrt(2 pi).
  double epsilon = 1e-4;
  /// LSQR iteration cap = factor * (rows + cols).
  double lsqr_iter_factor = 10.0;
  /// Independent probes, each with a fresh right-hand side.
  std::size_t repeats = 1;
  std::uint64_t seed = kDefaultSeed;

  void validate() const;
};

enum VerdictFlag : unsigned {
  kCountShortfall = 1u << 0,
  kResidualFloor = 1u << 1,
  kStressVacuous = 1u << 2,  // minimal-pattern-stress-vacuous
};

struct Verdict {
  bool completable = false;
  TestKind test = TestKind::Local;
  PatternKind kind = PatternKind::Gram;
  std::size_t d = 0;
  std::size_t n1 = 0;  // n for Gram patterns
  std::size_t n2 = 0;  // 0 for Gram patterns
  std::size_t m = 0;
  std::size_t trivial_dim = 0;
  /// LSQR residual of every probe that ran (local probes, then stress-matrix
  /// probes for the global test).
  std::vector<double> residuals;
  double tolerance = 0.0;
  std::optional<double> stress_residual;  // ||C^T w|| / ||w0||
  std::size_t lsqr_iterations = 0;
  unsigned flags = 0;
  double wall_secs = 0.0;

  bool has(VerdictFlag f) const noexcept { return (flags & f) != 0; }
  double residual() const noexcept;
};

struct ProbeResult {
  bool has_nontrivial_kernel = false;
  double residual = 0.0;  // largest residual over the probes
  std::vector<double> residuals;
  bool residual_floor = false;  // some probe stopped by stagnation or the cap
  std::size_t iterations = 0;
};

/// Decides whether null(M) is larger than col(known_kernel): draws a unit b
/// orthogonal to the known kernel and tries to solve M^T x = b by LSQR to
/// tol = epsilon / sqrt(vertex_count). Unsolvable means b has a component in
/// null(M) outside the known kernel. known_kernel must lie in null(M).
ProbeResult null_space_probe(const SparseMatrix& m, const DenseMatrix& known_kernel,
                             const TestConfig& cfg, std::size_t vertex_count,
                             std::uint64_t seed);

/// Randomized generic local completability test (count pre-check, then a
/// null-space probe of the completion matrix at a random realization).
Verdict test_local(const Pattern& pattern, std::size_t d, const TestConfig& cfg);

/// Randomized generic global completability test via a random stress
/// matrix. Runs test_local first.
Verdict test_global(const Pattern& pattern, std::size_t d, const TestConfig& cfg);

Verdict run_test(const Pattern& pattern, TestKind test, std::size_t d, const TestConfig& cfg);

/// Random element of the left null space of c: w0 + delta with delta the
/// minimum-norm LSQR correction of min ||c^T (w0 + delta)||.
struct StressResult {
  Vector weights;
  Vector initial;
  double residual = 0.0;  // ||c^T w||
  std::size_t iterations = 0;
};
StressResult random_stress(const SparseMatrix& c, std::uint64_t seed, double rel_tol = 1e-12);

std::vector<std::string> flag_names(unsigned flags);
/// JSON object (schema 1) describing the verdict.
std::string verdict_json(const Verdict& v);

}  // namespace unicomp
