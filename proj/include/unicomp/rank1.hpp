#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unicomp/numkit.hpp"
#include "unicomp/pattern.hpp"

namespace unicomp {

struct ComponentDiagnostics {
  std::vector<std::size_t> vertices;
  std::size_t edge_count = 0;
  bool has_self_loop = false;
  bool bipartite = true;  // a self loop makes a component non-bipartite
};

/// Exact combinatorial rank-1 completability.
struct Rank1Verdict {
  bool minimally_locally = false;
  bool locally = false;
  bool minimally_globally = false;
  bool globally = false;
  std::vector<ComponentDiagnostics> components;
};

/// Gram, rank 1. A self loop counts as an odd cycle of length 1.
///   minimally_locally:  every component has |E| = |V| and an odd cycle
///   locally:            every component has an odd cycle
///   minimally_globally: connected, |E| = |V|, odd cycle
///   globally:           connected with an odd cycle
Rank1Verdict check_gram_rank1(const GramPattern& pattern);

/// Rectangular, rank 1. The single trivial motion is a global rescaling, so
/// the minimal patterns are the (1,1)-tight sparse graphs: spanning trees.
///   minimally_locally = minimally_globally: spanning tree
///   locally = globally: connected
Rank1Verdict check_rect_rank1(const RectPattern& pattern);

/// L x L coefficient matrix of the linearized constraints around a cycle
/// 1-2-...-L-1 (row i: p_{i+1} in column i, p_i in column i+1, cyclically).
DenseMatrix cycle_matrix(std::span<const double> points);
/// Closed form det = (1 + (-1)^(L+1)) * prod p_i.
double cycle_determinant(std::span<const double> points);

/// Observed values J_ij keyed by canonical (min, max) 0-based edge.
using Rank1Values = std::map<Edge, double>;

/// Lines "i j value" (1-based); '#' comment lines and blank lines ignored.
Rank1Values parse_values(std::istream& in);
Rank1Values parse_values(std::string_view text);
Rank1Values read_values_file(const std::filesystem::path& path);

struct Rank1Completion {
  /// One representative; each component may be negated independently.
  Vector points;
  Components components;
};

/// Recovers p with J_ij = p_i p_j from the observed entries by solving
/// q_i + q_j = log|J_ij| and the Z_2 sign system over a BFS spanning tree
/// plus one odd-cycle edge per component, then verifies every observed
/// entry. Errors: ZeroEntry, Underdetermined, SignInconsistent,
/// NotRank1Consistent.
Rank1Completion complete_gram_rank1(const GramPattern& pattern, const Rank1Values& values);

std::string rank1_verdict_json(const Rank1Verdict& v, PatternKind kind);
std::string rank1_completion_json(const Rank1Completion& c);

}  // namespace unicomp
