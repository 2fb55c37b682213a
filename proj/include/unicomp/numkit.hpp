#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "unicomp/rng.hpp"

namespace unicomp {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;  // column-major

/// Matrix-free operator: everything LSQR needs.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  /// y = A x
  virtual void apply(const Vector& x, Vector& y) const = 0;
  /// x = A^T y
  virtual void apply_transpose(const Vector& y, Vector& x) const = 0;
};

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

/// Compressed-row sparse matrix assembled from coordinate triplets.
/// Duplicate (row, col) triplets are summed during assembly.
class SparseMatrix final : public LinearOperator {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::span<const Triplet> entries);

  std::size_t rows() const override { return rows_; }
  std::size_t cols() const override { return cols_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }
  std::size_t row_nonzeros(std::size_t r) const { return row_ptr_[r + 1] - row_ptr_[r]; }

  /// Stored value at (r, c), zero if absent.
  double coeff(std::size_t r, std::size_t c) const;

  Vector matvec(const Vector& x) const;
  Vector rmatvec(const Vector& y) const;
  void apply(const Vector& x, Vector& y) const override;
  void apply_transpose(const Vector& y, Vector& x) const override;

  DenseMatrix to_dense() const;
  /// Explicit transpose (the operator never needs it; tests use it).
  SparseMatrix transposed() const;
  std::vector<Triplet> triplets() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

/// Views an operator as its transpose without copying.
class TransposedOperator final : public LinearOperator {
 public:
  explicit TransposedOperator(const LinearOperator& base) : base_(base) {}
  std::size_t rows() const override { return base_.cols(); }
  std::size_t cols() const override { return base_.rows(); }
  void apply(const Vector& x, Vector& y) const override { base_.apply_transpose(x, y); }
  void apply_transpose(const Vector& y, Vector& x) const override { base_.apply(y, x); }

 private:
  const LinearOperator& base_;
};

enum class LsqrStatus { Converged, ResidualFloor, MaxIterations };

const char* to_string(LsqrStatus s) noexcept;

struct LsqrOptions {
  /// Absolute bound on ||b - A x||; also the default bound on
  /// ||A^T r|| / (||A|| ||r||).
  double tol = 1e-8;
  /// Overrides the normal-equation bound when set; 0 disables that test.
  std::optional<double> normal_tol;
  /// 0 means 10 * (rows + cols).
  std::size_t max_iter = 0;
  /// Starting point; LSQR then solves for the correction.
  std::optional<Vector> x0;
  /// Plateau detection: residual-floor when ||r|| decreased by less than
  /// plateau_rel (relative) over plateau_window iterations while above tol.
  double plateau_rel = 1e-3;
  std::size_t plateau_window = 50;
};

struct LsqrResult {
  Vector x;
  double residual_norm = 0.0;         // ||b - A x||
  double normal_residual_norm = 0.0;  // estimate of ||A^T r||
  double operator_norm = 0.0;         // Frobenius-norm estimate of A
  std::size_t iterations = 0;
  LsqrStatus status = LsqrStatus::Converged;
};

/// Paige-Saunders LSQR for min ||A x - b||.
LsqrResult lsqr(const LinearOperator& a, const Vector& b, const LsqrOptions& options = {});

/// Orthonormal basis of col(T) by Householder QR. Throws RankDeficient
/// when the columns of T are numerically dependent.
DenseMatrix orthonormal_basis(const DenseMatrix& t);

/// Unit vector drawn from the standard normal distribution projected onto
/// col(Q)^perp. QQ^T is never formed.
Vector random_unit_in_complement(const DenseMatrix& q, Rng& rng);
Vector random_unit_in_complement(const DenseMatrix& q, std::uint64_t seed);

inline constexpr double kDefaultRankTol = 1e-8;

/// Number of singular values above rel_tol times the largest one.
std::size_t dense_rank(const DenseMatrix& a, double rel_tol = kDefaultRankTol);

}  // namespace unicomp
