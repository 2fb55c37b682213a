#pragma once

#include <cstddef>
#include <cstdint>

#include "unicomp/numkit.hpp"
#include "unicomp/pattern.hpp"

namespace unicomp {

/// Points attached to the vertices of a pattern. Coordinates are stored as a
/// d x (#vertices) matrix, one column per vertex; for rectangular patterns the
/// n1 row vectors u_i come first, then the n2 column vectors v_j.
class Realization {
 public:
  Realization(PatternKind kind, std::size_t n1, std::size_t n2, DenseMatrix coords);

  static Realization gram(DenseMatrix coords);
  static Realization rect(DenseMatrix u, DenseMatrix v);

  PatternKind kind() const noexcept { return kind_; }
  std::size_t d() const noexcept { return static_cast<std::size_t>(coords_.rows()); }
  std::size_t n1() const noexcept { return n1_; }
  std::size_t n2() const noexcept { return n2_; }
  std::size_t vertex_count() const noexcept { return static_cast<std::size_t>(coords_.cols()); }
  const DenseMatrix& coords() const noexcept { return coords_; }
  auto point(std::size_t vertex) const { return coords_.col(static_cast<Eigen::Index>(vertex)); }

  /// Same realization with every coordinate multiplied by s.
  Realization scaled(double s) const;

 private:
  PatternKind kind_;
  std::size_t n1_;
  std::size_t n2_;
  DenseMatrix coords_;
};

/// i.i.d. standard normal coordinates; generic with probability one.
Realization random_realization(const Pattern& pattern, std::size_t d, std::uint64_t seed);

/// m x d*n. Row e = (i, j): p_j in the columns of vertex i and p_i in those
/// of vertex j; a self loop (i, i) gets 2 p_i. Rows follow edge order.
SparseMatrix gram_completion_matrix(const GramPattern& pattern, const Realization& r);
/// m x d*(n1+n2). Row (i, j): v_j in the u_i block and u_i in the v_j block.
SparseMatrix rect_completion_matrix(const RectPattern& pattern, const Realization& r);
SparseMatrix completion_matrix(const Pattern& pattern, const Realization& r);

/// Infinitesimal motions that preserve every inner product, stored as the
/// columns of a (d * #vertices) x k matrix.
struct TrivialMotionBasis {
  DenseMatrix motions;
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(motions.cols()); }
};

/// Columns (A p_1, ..., A p_n) for the skew generators A = e_b e_a^T - e_a e_b^T,
/// a < b in lexicographic order: d(d-1)/2 columns.
TrivialMotionBasis gram_trivial_basis(const Realization& r);
/// Columns (A u_1, ..., A u_n1, -A^T v_1, ..., -A^T v_n2) for the d^2
/// elementary matrices A = e_a e_b^T in row-major (a, b) order.
TrivialMotionBasis rect_trivial_basis(const Realization& r);
TrivialMotionBasis trivial_basis(const Realization& r);

std::size_t trivial_dimension(PatternKind kind, std::size_t d) noexcept;

struct StressMatrix {
  SparseMatrix matrix;  // symmetric, #vertices x #vertices
  Vector weights;       // the stress vector, one weight per edge
};

/// Omega_ij = Omega_ji = w_e for an edge e = (i, j), i != j. A self loop
/// (i, i) contributes 2 w_e to the diagonal, matching the 2 p_i row of the
/// completion matrix so that the realization coordinates stay in the kernel.
StressMatrix assemble_gram_stress(const GramPattern& pattern, const Vector& weights);
/// [[0, W], [W^T, 0]] with W_ij = w_e for the observed entry e = (i, j).
StressMatrix assemble_rect_stress(const RectPattern& pattern, const Vector& weights);
StressMatrix assemble_stress(const Pattern& pattern, const Vector& weights);

/// Vectors every stress matrix annihilates: the d coordinate vectors (Gram,
/// #vertices x d) or the 2d columns of [[U, 0], [0, V]] (rectangular).
DenseMatrix stress_kernel_basis(const Realization& r);

}  // namespace unicomp
