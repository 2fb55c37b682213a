#include "unicomp/completion.hpp"

#include <string>

#include <Eigen/SVD>

#include "unicomp/error.hpp"
#include "unicomp/rng.hpp"

namespace unicomp {

namespace {

void require_matching(const Realization& r, PatternKind kind, std::size_t n1, std::size_t n2) {
  if (r.kind() != kind || r.n1() != n1 || r.n2() != n2) {
    raise(ErrorCode::DimensionMismatch, "realization does not match the pattern dimensions");
  }
}

void require_independent(const DenseMatrix& t) {
  if (t.cols() == 0) return;
  const Vector sv = Eigen::JacobiSVD<DenseMatrix>(t).singularValues();
  if (sv(0) == 0.0 || sv(sv.size() - 1) <= 1e-10 * sv(0)) {
    raise(ErrorCode::RankDeficient, "trivial motions are dependent: degenerate realization");
  }
}

}  // namespace

Realization::Realization(PatternKind kind, std::size_t n1, std::size_t n2, DenseMatrix coords)
    : kind_(kind), n1_(n1), n2_(kind == PatternKind::Gram ? 0 : n2), coords_(std::move(coords)) {
  if (coords_.rows() < 1) raise(ErrorCode::InvalidArgument, "realization needs d >= 1");
  if (static_cast<std::size_t>(coords_.cols()) != n1_ + n2_) {
    raise(ErrorCode::DimensionMismatch, "realization has " + std::to_string(coords_.cols()) +
                                            " points, pattern has " + std::to_string(n1_ + n2_) +
                                            " vertices");
  }
  if (!coords_.allFinite()) raise(ErrorCode::NonFinite, "realization coordinates must be finite");
}

Realization Realization::gram(DenseMatrix coords) {
  const auto n = static_cast<std::size_t>(coords.cols());
  return Realization(PatternKind::Gram, n, 0, std::move(coords));
}

Realization Realization::rect(DenseMatrix u, DenseMatrix v) {
  if (u.rows() != v.rows()) raise(ErrorCode::DimensionMismatch, "u and v must share dimension d");
  DenseMatrix coords(u.rows(), u.cols() + v.cols());
  coords << u, v;
  return Realization(PatternKind::Rect, static_cast<std::size_t>(u.cols()),
                     static_cast<std::size_t>(v.cols()), std::move(coords));
}

Realization Realization::scaled(double s) const { return Realization(kind_, n1_, n2_, coords_ * s); }

Realization random_realization(const Pattern& pattern, std::size_t d, std::uint64_t seed) {
  if (d < 1) raise(ErrorCode::InvalidArgument, "rank d must be at least 1");
  Rng rng(seed);
  const std::size_t count = vertex_count(pattern);
  DenseMatrix coords(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(count));
  for (Eigen::Index v = 0; v < coords.cols(); ++v) {
    for (Eigen::Index k = 0; k < coords.rows(); ++k) coords(k, v) = rng.normal();
  }
  if (const auto* g = std::get_if<GramPattern>(&pattern)) {
    return Realization(PatternKind::Gram, g->n(), 0, std::move(coords));
  }
  const auto& r = std::get<RectPattern>(pattern);
  return Realization(PatternKind::Rect, r.n1(), r.n2(), std::move(coords));
}

SparseMatrix gram_completion_matrix(const GramPattern& pattern, const Realization& r) {
  require_matching(r, PatternKind::Gram, pattern.n(), 0);
  const std::size_t d = r.d();
  std::vector<Triplet> t;
  t.reserve(2 * d * pattern.m());
  std::size_t row = 0;
  for (const Edge& e : pattern.edges()) {
    const auto pi = r.point(e.a);
    const auto pj = r.point(e.b);
    for (std::size_t k = 0; k < d; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      if (e.self_loop()) {
        t.push_back({row, e.a * d + k, 2.0 * pi[kk]});
      } else {
        t.push_back({row, e.a * d + k, pj[kk]});
        t.push_back({row, e.b * d + k, pi[kk]});
      }
    }
    ++row;
  }
  return SparseMatrix(pattern.m(), d * pattern.n(), t);
}

SparseMatrix rect_completion_matrix(const RectPattern& pattern, const Realization& r) {
  require_matching(r, PatternKind::Rect, pattern.n1(), pattern.n2());
  const std::size_t d = r.d();
  const std::size_t n1 = pattern.n1();
  std::vector<Triplet> t;
  t.reserve(2 * d * pattern.m());
  std::size_t row = 0;
  for (const Edge& e : pattern.edges()) {
    const auto u = r.point(e.a);
    const auto v = r.point(n1 + e.b);
    for (std::size_t k = 0; k < d; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      t.push_back({row, e.a * d + k, v[kk]});
      t.push_back({row, (n1 + e.b) * d + k, u[kk]});
    }
    ++row;
  }
  return SparseMatrix(pattern.m(), d * pattern.vertex_count(), t);
}

SparseMatrix completion_matrix(const Pattern& pattern, const Realization& r) {
  if (const auto* g = std::get_if<GramPattern>(&pattern)) return gram_completion_matrix(*g, r);
  return rect_completion_matrix(std::get<RectPattern>(pattern), r);
}

std::size_t trivial_dimension(PatternKind kind, std::size_t d) noexcept {
  return kind == PatternKind::Gram ? d * (d - 1) / 2 : d * d;
}

TrivialMotionBasis gram_trivial_basis(const Realization& r) {
  if (r.kind() != PatternKind::Gram) raise(ErrorCode::InvalidArgument, "gram basis needs a Gram realization");
  const auto d = static_cast<Eigen::Index>(r.d());
  const auto n = static_cast<Eigen::Index>(r.vertex_count());
  TrivialMotionBasis basis;
  basis.motions = DenseMatrix::Zero(d * n, d * (d - 1) / 2);
  Eigen::Index col = 0;
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) {
      // A = e_b e_a^T - e_a e_b^T: (A p)_a = -p_b, (A p)_b = p_a.
      for (Eigen::Index i = 0; i < n; ++i) {
        basis.motions(i * d + a, col) = -r.coords()(b, i);
        basis.motions(i * d + b, col) = r.coords()(a, i);
      }
      ++col;
    }
  }
  require_independent(basis.motions);
  return basis;
}

TrivialMotionBasis rect_trivial_basis(const Realization& r) {
  if (r.kind() != PatternKind::Rect) raise(ErrorCode::InvalidArgument, "rect basis needs a rectangular realization");
  const auto d = static_cast<Eigen::Index>(r.d());
  const auto n1 = static_cast<Eigen::Index>(r.n1());
  const auto total = static_cast<Eigen::Index>(r.vertex_count());
  TrivialMotionBasis basis;
  basis.motions = DenseMatrix::Zero(d * total, d * d);
  Eigen::Index col = 0;
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      // A = e_a e_b^T: A u = e_a u_b and -A^T v = -e_b v_a.
      for (Eigen::Index i = 0; i < n1; ++i) basis.motions(i * d + a, col) = r.coords()(b, i);
      for (Eigen::Index j = n1; j < total; ++j) basis.motions(j * d + b, col) = -r.coords()(a, j);
      ++col;
    }
  }
  require_independent(basis.motions);
  return basis;
}

TrivialMotionBasis trivial_basis(const Realization& r) {
  return r.kind() == PatternKind::Gram ? gram_trivial_basis(r) : rect_trivial_basis(r);
}

StressMatrix assemble_gram_stress(const GramPattern& pattern, const Vector& weights) {
  if (static_cast<std::size_t>(weights.size()) != pattern.m()) {
    raise(ErrorCode::DimensionMismatch, "stress has " + std::to_string(weights.size()) +
                                            " weights, pattern has " + std::to_string(pattern.m()) +
                                            " entries");
  }
  std::vector<Triplet> t;
  t.reserve(2 * pattern.m());
  Eigen::Index k = 0;
  for (const Edge& e : pattern.edges()) {
    const double w = weights[k++];
    if (e.self_loop()) {
      t.push_back({e.a, e.a, 2.0 * w});
    } else {
      t.push_back({e.a, e.b, w});
      t.push_back({e.b, e.a, w});
    }
  }
  return {SparseMatrix(pattern.n(), pattern.n(), t), weights};
}

StressMatrix assemble_rect_stress(const RectPattern& pattern, const Vector& weights) {
  if (static_cast<std::size_t>(weights.size()) != pattern.m()) {
    raise(ErrorCode::DimensionMismatch, "stress has " + std::to_string(weights.size()) +
                                            " weights, pattern has " + std::to_string(pattern.m()) +
                                            " entries");
  }
  const std::size_t n1 = pattern.n1();
  std::vector<Triplet> t;
  t.reserve(2 * pattern.m());
  Eigen::Index k = 0;
  for (const Edge& e : pattern.edges()) {
    const double w = weights[k++];
    t.push_back({e.a, n1 + e.b, w});
    t.push_back({n1 + e.b, e.a, w});
  }
  return {SparseMatrix(pattern.vertex_count(), pattern.vertex_count(), t), weights};
}

StressMatrix assemble_stress(const Pattern& pattern, const Vector& weights) {
  if (const auto* g = std::get_if<GramPattern>(&pattern)) return assemble_gram_stress(*g, weights);
  return assemble_rect_stress(std::get<RectPattern>(pattern), weights);
}

DenseMatrix stress_kernel_basis(const Realization& r) {
  const auto d = static_cast<Eigen::Index>(r.d());
  if (r.kind() == PatternKind::Gram) return r.coords().transpose();
  const auto n1 = static_cast<Eigen::Index>(r.n1());
  const auto n2 = static_cast<Eigen::Index>(r.n2());
  DenseMatrix k = DenseMatrix::Zero(n1 + n2, 2 * d);
  k.topLeftCorner(n1, d) = r.coords().leftCols(n1).transpose();
  k.bottomRightCorner(n2, d) = r.coords().rightCols(n2).transpose();
  return k;
}

}  // namespace unicomp
