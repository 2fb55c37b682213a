#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace unicomp {

enum class PatternKind { Gram, Rect };

const char* to_string(PatternKind kind) noexcept;

/// An observed entry, 0-based. For Gram patterns (a, b) is stored with
/// a <= b and a == b marks an observed diagonal entry. For rectangular
/// patterns a is the row and b the column.
struct Edge {
  std::uint32_t a = 0;
  std::uint32_t b = 0;

  bool self_loop() const noexcept { return a == b; }
  auto operator<=>(const Edge&) const = default;
};

/// Observation pattern of a symmetric n x n matrix. Immutable; the
/// constructor validates and sorts the edges, so every instance satisfies
/// the invariants (indices in range, no duplicates).
class GramPattern {
 public:
  GramPattern(std::size_t n, std::vector<Edge> edges);

  std::size_t n() const noexcept { return n_; }
  std::size_t vertex_count() const noexcept { return n_; }
  std::size_t m() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::size_t self_loop_count() const noexcept;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
};

/// Observation pattern of an n1 x n2 matrix: a bipartite graph whose first
/// n1 vertices are rows and last n2 vertices are columns.
class RectPattern {
 public:
  RectPattern(std::size_t n1, std::size_t n2, std::vector<Edge> edges);

  std::size_t n1() const noexcept { return n1_; }
  std::size_t n2() const noexcept { return n2_; }
  std::size_t vertex_count() const noexcept { return n1_ + n2_; }
  std::size_t m() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

 private:
  std::size_t n1_;
  std::size_t n2_;
  std::vector<Edge> edges_;
};

using Pattern = std::variant<GramPattern, RectPattern>;

PatternKind kind_of(const Pattern& p) noexcept;
std::size_t vertex_count(const Pattern& p) noexcept;
std::size_t edge_count(const Pattern& p) noexcept;

/// Each of the n(n+1)/2 entries on or above the diagonal is observed
/// independently with probability beta.
GramPattern sample_gram(std::size_t n, double beta, std::uint64_t seed);
RectPattern sample_rect(std::size_t n1, std::size_t n2, double beta,
                        std::uint64_t seed);

/// Connected components as sorted vertex lists, ordered by smallest vertex.
/// Rectangular vertex ids are rows 0..n1-1 followed by columns n1..n1+n2-1.
using Components = std::vector<std::vector<std::size_t>>;
Components connected_components(const GramPattern& p);
Components connected_components(const RectPattern& p);
Components connected_components(const Pattern& p);

// Text format (1-based indices):
//   kind gram|rect
//   size n | size n1 n2
//   edges m
//   i j          (m lines)
// Lines starting with '#' and blank lines are ignored.
Pattern parse_pattern(std::istream& in);
Pattern parse_pattern(std::string_view text);
Pattern read_pattern_file(const std::filesystem::path& path);

void write_pattern(std::ostream& out, const Pattern& p);
std::string format_pattern(const Pattern& p);

}  // namespace unicomp
