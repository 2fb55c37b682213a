#include "unicomp/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/SVD>

#include "unicomp/error.hpp"

namespace unicomp {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::span<const Triplet> entries)
    : rows_(rows), cols_(cols) {
  std::vector<std::size_t> order(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Triplet& t = entries[k];
    if (t.row >= rows || t.col >= cols) {
      raise(ErrorCode::DimensionMismatch, "triplet (" + std::to_string(t.row) + ", " +
                                              std::to_string(t.col) + ") outside " +
                                              std::to_string(rows) + " x " + std::to_string(cols));
    }
    if (!std::isfinite(t.value)) raise(ErrorCode::NonFinite, "non-finite matrix entry");
  }
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const Triplet& a = entries[x];
    const Triplet& b = entries[y];
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  row_ptr_.assign(rows + 1, 0);
  col_idx_.reserve(entries.size());
  values_.reserve(entries.size());
  std::size_t last_row = rows, last_col = cols;
  for (std::size_t k : order) {
    const Triplet& t = entries[k];
    if (t.row == last_row && t.col == last_col) {
      values_.back() += t.value;
      continue;
    }
    col_idx_.push_back(t.col);
    values_.push_back(t.value);
    ++row_ptr_[t.row + 1];
    last_row = t.row;
    last_col = t.col;
  }
  std::partial_sum(row_ptr_.begin(), row_ptr_.end(), row_ptr_.begin());
}

double SparseMatrix::coeff(std::size_t r, std::size_t c) const {
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
  const auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

void SparseMatrix::apply(const Vector& x, Vector& y) const {
  if (static_cast<std::size_t>(x.size()) != cols_) {
    raise(ErrorCode::DimensionMismatch, "matvec: vector has " + std::to_string(x.size()) +
                                            " entries, matrix has " + std::to_string(cols_) +
                                            " columns");
  }
  y.resize(static_cast<Eigen::Index>(rows_));
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      acc += values_[k] * x[static_cast<Eigen::Index>(col_idx_[k])];
    }
    y[static_cast<Eigen::Index>(r)] = acc;
  }
}

void SparseMatrix::apply_transpose(const Vector& y, Vector& x) const {
  if (static_cast<std::size_t>(y.size()) != rows_) {
    raise(ErrorCode::DimensionMismatch, "rmatvec: vector has " + std::to_string(y.size()) +
                                            " entries, matrix has " + std::to_string(rows_) +
                                            " rows");
  }
  x.setZero(static_cast<Eigen::Index>(cols_));
  for (std::size_t r = 0; r < rows_; ++r) {
    const double yr = y[static_cast<Eigen::Index>(r)];
    if (yr == 0.0) continue;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      x[static_cast<Eigen::Index>(col_idx_[k])] += values_[k] * yr;
    }
  }
}

Vector SparseMatrix::matvec(const Vector& x) const {
  Vector y;
  apply(x, y);
  return y;
}

Vector SparseMatrix::rmatvec(const Vector& y) const {
  Vector x;
  apply_transpose(y, x);
  return x;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col_idx_[k])) = values_[k];
    }
  }
  return d;
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(values_.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out.push_back({r, col_idx_[k], values_[k]});
  }
  return out;
}

SparseMatrix SparseMatrix::transposed() const {
  std::vector<Triplet> t = triplets();
  for (Triplet& e : t) std::swap(e.row, e.col);
  return SparseMatrix(cols_, rows_, t);
}

const char* to_string(LsqrStatus s) noexcept {
  switch (s) {
    case LsqrStatus::Converged: return "converged";
    case LsqrStatus::ResidualFloor: return "residual-floor";
    case LsqrStatus::MaxIterations: return "max-iters";
  }
  return "unknown";
}

LsqrResult lsqr(const LinearOperator& a, const Vector& b, const LsqrOptions& options) {
  const auto m = static_cast<Eigen::Index>(a.rows());
  const auto n = static_cast<Eigen::Index>(a.cols());
  if (b.size() != m) raise(ErrorCode::DimensionMismatch, "lsqr: right-hand side length differs from rows");
  if (!b.allFinite()) raise(ErrorCode::NonFinite, "lsqr: right-hand side is not finite");
  if (!(options.tol >= 0.0)) raise(ErrorCode::InvalidArgument, "lsqr: tolerance must be non-negative");
  if (options.x0) {
    if (options.x0->size() != n) raise(ErrorCode::DimensionMismatch, "lsqr: x0 length differs from columns");
    if (!options.x0->allFinite()) raise(ErrorCode::NonFinite, "lsqr: x0 is not finite");
  }

  const double tol = options.tol;
  const double normal_tol = options.normal_tol.value_or(tol);
  const std::size_t max_iter =
      options.max_iter > 0 ? options.max_iter : 10 * (a.rows() + a.cols());

  LsqrResult res;
  res.x = options.x0 ? *options.x0 : Vector::Zero(n);

  Vector u = b;
  Vector av(m), atu(n);
  if (options.x0) {
    a.apply(res.x, av);
    u -= av;
  }
  double beta = u.norm();
  Vector v = Vector::Zero(n);
  double alpha = 0.0;
  if (beta > 0.0) {
    u /= beta;
    a.apply_transpose(u, v);
    alpha = v.norm();
  }
  if (alpha > 0.0) v /= alpha;

  res.residual_norm = beta;
  res.normal_residual_norm = alpha * beta;
  if (beta <= tol || alpha == 0.0) {
    res.status = LsqrStatus::Converged;
    return res;
  }

  Vector w = v;
  Vector dx = Vector::Zero(n);
  double rhobar = alpha;
  double phibar = beta;
  double anorm = 0.0;
  double rnorm = beta;
  double arnorm = alpha * beta;
  std::vector<double> history;
  history.reserve(std::min<std::size_t>(max_iter + 1, 1 << 16));
  history.push_back(beta);
  res.status = LsqrStatus::MaxIterations;

  std::size_t itn = 0;
  while (itn < max_iter) {
    ++itn;
    // Bidiagonalization step.
    a.apply(v, av);
    u = av - alpha * u;
    beta = u.norm();
    if (beta > 0.0) {
      u /= beta;
      anorm = std::sqrt(anorm * anorm + alpha * alpha + beta * beta);
      a.apply_transpose(u, atu);
      v = atu - beta * v;
      alpha = v.norm();
      if (alpha > 0.0) v /= alpha;
    } else {
      anorm = std::sqrt(anorm * anorm + alpha * alpha);
    }

    // Plane rotation eliminating the subdiagonal beta.
    const double rho = std::hypot(rhobar, beta);
    const double c = rhobar / rho;
    const double s = beta / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;
    const double tau = s * phi;

    dx += (phi / rho) * w;
    w = v - (theta / rho) * w;

    rnorm = phibar;
    arnorm = alpha * std::abs(tau);
    history.push_back(rnorm);

    if (rnorm <= tol) {
      res.status = LsqrStatus::Converged;
      break;
    }
    if (alpha == 0.0 || (normal_tol > 0.0 && arnorm <= normal_tol * anorm * rnorm)) {
      res.status = LsqrStatus::Converged;
      break;
    }
    if (options.plateau_window > 0 && itn >= options.plateau_window) {
      const double past = history[itn - options.plateau_window];
      if (rnorm > (1.0 - options.plateau_rel) * past) {
        res.status = LsqrStatus::ResidualFloor;
        break;
      }
    }
  }

  res.x += dx;
  res.iterations = itn;
  res.operator_norm = anorm;
  res.normal_residual_norm = arnorm;
  a.apply(res.x, av);
  res.residual_norm = (b - av).norm();
  if (!std::isfinite(res.residual_norm)) raise(ErrorCode::NumericalFailure, "lsqr: iteration diverged");
  return res;
}

DenseMatrix orthonormal_basis(const DenseMatrix& t) {
  const Eigen::Index rows = t.rows();
  const Eigen::Index k = t.cols();
  if (k == 0) return DenseMatrix(rows, 0);
  if (!t.allFinite()) raise(ErrorCode::NonFinite, "orthonormal_basis: non-finite input");
  if (k > rows) raise(ErrorCode::RankDeficient, "orthonormal_basis: more columns than rows");

  Eigen::HouseholderQR<DenseMatrix> qr(t);
  // R has the singular values of T.
  const DenseMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const Vector sv = Eigen::JacobiSVD<DenseMatrix>(r).singularValues();
  if (sv(0) == 0.0 || sv(k - 1) <= 1e-10 * sv(0)) {
    raise(ErrorCode::RankDeficient, "orthonormal_basis: columns are numerically dependent");
  }
  return qr.householderQ() * DenseMatrix::Identity(rows, k);
}

Vector random_unit_in_complement(const DenseMatrix& q, Rng& rng) {
  const Eigen::Index n = q.rows();
  if (n == 0) raise(ErrorCode::InvalidArgument, "random_unit_in_complement: empty space");
  for (int attempt = 0; attempt < 2; ++attempt) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
    const double before = v.norm();
    if (q.cols() > 0) {
      // Two passes of I - QQ^T keep Q^T b at rounding level.
      v -= q * (q.transpose() * v);
      v -= q * (q.transpose() * v);
    }
    const double norm = v.norm();
    if (norm > 1e-10 * before) return v / norm;
  }
  raise(ErrorCode::NumericalFailure, "random_unit_in_complement: projection vanished twice");
}

Vector random_unit_in_complement(const DenseMatrix& q, std::uint64_t seed) {
  Rng rng(seed);
  return random_unit_in_complement(q, rng);
}

std::size_t dense_rank(const DenseMatrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  if (!a.allFinite()) raise(ErrorCode::NonFinite, "dense_rank: non-finite input");
  const Vector sv = Eigen::BDCSVD<DenseMatrix>(a).singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cut = rel_tol * sv(0);
  return static_cast<std::size_t>((sv.array() > cut).count());
}

}  // namespace unicomp
