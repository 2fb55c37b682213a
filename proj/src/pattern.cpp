#include "unicomp/pattern.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "unicomp/error.hpp"
#include "unicomp/rng.hpp"

namespace unicomp {

namespace {

constexpr std::size_t kMaxVertices = std::numeric_limits<std::uint32_t>::max();

void check_sorted_unique(const std::vector<Edge>& edges, const char* what) {
  auto dup = std::adjacent_find(edges.begin(), edges.end());
  if (dup != edges.end()) {
    raise(ErrorCode::InvalidArgument, std::string("duplicate ") + what + " (" +
                                          std::to_string(dup->a + 1) + ", " +
                                          std::to_string(dup->b + 1) + ")");
  }
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

Components collect(UnionFind& uf, std::size_t n) {
  Components out;
  std::vector<std::size_t> slot(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t root = uf.find(v);
    if (slot[root] == std::numeric_limits<std::size_t>::max()) {
      slot[root] = out.size();
      out.emplace_back();
    }
    out[slot[root]].push_back(v);
  }
  return out;
}

// Reads the next line that is neither blank nor a comment.
bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

[[noreturn]] void parse_error(std::size_t lineno, const std::string& msg) {
  raise(ErrorCode::Parse, "line " + std::to_string(lineno) + ": " + msg);
}

std::size_t parse_count(std::istringstream& ss, std::size_t lineno, const char* what) {
  long long v = 0;
  if (!(ss >> v)) parse_error(lineno, std::string("expected ") + what);
  if (v < 0) parse_error(lineno, std::string(what) + " must be non-negative");
  return static_cast<std::size_t>(v);
}

void expect_end(std::istringstream& ss, std::size_t lineno) {
  std::string extra;
  if (ss >> extra) parse_error(lineno, "unexpected trailing token '" + extra + "'");
}

}  // namespace

const char* to_string(PatternKind kind) noexcept {
  return kind == PatternKind::Gram ? "gram" : "rect";
}

GramPattern::GramPattern(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ == 0 || n_ > kMaxVertices) raise(ErrorCode::InvalidArgument, "gram pattern needs n >= 1");
  for (Edge& e : edges_) {
    if (e.a >= n_ || e.b >= n_) {
      raise(ErrorCode::InvalidArgument, "edge (" + std::to_string(e.a + 1) + ", " +
                                            std::to_string(e.b + 1) + ") out of range for n = " +
                                            std::to_string(n_));
    }
    if (e.a > e.b) std::swap(e.a, e.b);
  }
  std::sort(edges_.begin(), edges_.end());
  check_sorted_unique(edges_, "entry");
}

std::size_t GramPattern::self_loop_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.self_loop(); }));
}

RectPattern::RectPattern(std::size_t n1, std::size_t n2, std::vector<Edge> edges)
    : n1_(n1), n2_(n2), edges_(std::move(edges)) {
  if (n1_ == 0 || n2_ == 0 || n1_ + n2_ > kMaxVertices) {
    raise(ErrorCode::InvalidArgument, "rect pattern needs n1, n2 >= 1");
  }
  for (const Edge& e : edges_) {
    if (e.a >= n1_ || e.b >= n2_) {
      raise(ErrorCode::InvalidArgument,
            "entry (" + std::to_string(e.a + 1) + ", " + std::to_string(e.b + 1) +
                ") out of range for a " + std::to_string(n1_) + " x " + std::to_string(n2_) +
                " matrix (entries must join a row to a column)");
    }
  }
  std::sort(edges_.begin(), edges_.end());
  check_sorted_unique(edges_, "entry");
}

PatternKind kind_of(const Pattern& p) noexcept {
  return std::holds_alternative<GramPattern>(p) ? PatternKind::Gram : PatternKind::Rect;
}

std::size_t vertex_count(const Pattern& p) noexcept {
  return std::visit([](const auto& q) { return q.vertex_count(); }, p);
}

std::size_t edge_count(const Pattern& p) noexcept {
  return std::visit([](const auto& q) { return q.m(); }, p);
}

GramPattern sample_gram(std::size_t n, double beta, std::uint64_t seed) {
  if (!(beta >= 0.0 && beta <= 1.0)) raise(ErrorCode::InvalidArgument, "beta must lie in [0, 1]");
  if (n == 0) raise(ErrorCode::InvalidArgument, "n must be positive");
  Rng rng(seed);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(beta * static_cast<double>(n) * (n + 1) / 2 * 1.1) + 8);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i; j < n; ++j) {
      if (rng.bernoulli(beta)) edges.push_back({i, j});
    }
  }
  return GramPattern(n, std::move(edges));
}

RectPattern sample_rect(std::size_t n1, std::size_t n2, double beta, std::uint64_t seed) {
  if (!(beta >= 0.0 && beta <= 1.0)) raise(ErrorCode::InvalidArgument, "beta must lie in [0, 1]");
  if (n1 == 0 || n2 == 0) raise(ErrorCode::InvalidArgument, "n1 and n2 must be positive");
  Rng rng(seed);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(beta * static_cast<double>(n1) * n2 * 1.1) + 8);
  for (std::uint32_t i = 0; i < n1; ++i) {
    for (std::uint32_t j = 0; j < n2; ++j) {
      if (rng.bernoulli(beta)) edges.push_back({i, j});
    }
  }
  return RectPattern(n1, n2, std::move(edges));
}

Components connected_components(const GramPattern& p) {
  UnionFind uf(p.n());
  for (const Edge& e : p.edges()) uf.unite(e.a, e.b);
  return collect(uf, p.n());
}

Components connected_components(const RectPattern& p) {
  UnionFind uf(p.vertex_count());
  for (const Edge& e : p.edges()) uf.unite(e.a, p.n1() + e.b);
  return collect(uf, p.vertex_count());
}

Components connected_components(const Pattern& p) {
  return std::visit([](const auto& q) { return connected_components(q); }, p);
}

Pattern parse_pattern(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;

  if (!next_content_line(in, line, lineno)) parse_error(lineno, "missing 'kind' header");
  PatternKind kind;
  {
    std::istringstream ss(line);
    std::string key, value;
    ss >> key >> value;
    if (key != "kind") parse_error(lineno, "expected 'kind gram' or 'kind rect'");
    if (value == "gram") {
      kind = PatternKind::Gram;
    } else if (value == "rect") {
      kind = PatternKind::Rect;
    } else {
      parse_error(lineno, "unknown kind '" + value + "'");
    }
    expect_end(ss, lineno);
  }

  if (!next_content_line(in, line, lineno)) parse_error(lineno, "missing 'size' header");
  std::size_t n1 = 0, n2 = 0;
  {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key != "size") parse_error(lineno, "expected 'size'");
    n1 = parse_count(ss, lineno, "dimension");
    if (kind == PatternKind::Rect) n2 = parse_count(ss, lineno, "column count");
    expect_end(ss, lineno);
    if (n1 == 0 || (kind == PatternKind::Rect && n2 == 0)) parse_error(lineno, "dimensions must be positive");
    if (n1 > kMaxVertices || n2 > kMaxVertices) parse_error(lineno, "dimension too large");
  }

  if (!next_content_line(in, line, lineno)) parse_error(lineno, "missing 'edges' header");
  std::size_t m = 0;
  {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key != "edges") parse_error(lineno, "expected 'edges'");
    m = parse_count(ss, lineno, "edge count");
    expect_end(ss, lineno);
  }

  const std::size_t rows = n1;
  const std::size_t cols = kind == PatternKind::Gram ? n1 : n2;
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (!next_content_line(in, line, lineno)) {
      parse_error(lineno, "expected " + std::to_string(m) + " edges, found " + std::to_string(k));
    }
    std::istringstream ss(line);
    long long i = 0, j = 0;
    if (!(ss >> i >> j)) parse_error(lineno, "expected 'i j'");
    expect_end(ss, lineno);
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > rows || static_cast<std::size_t>(j) > cols) {
      parse_error(lineno, "index out of range");
    }
    edges.push_back({static_cast<std::uint32_t>(i - 1), static_cast<std::uint32_t>(j - 1)});
  }
  if (next_content_line(in, line, lineno)) parse_error(lineno, "content after the last edge");

  try {
    if (kind == PatternKind::Gram) return GramPattern(n1, std::move(edges));
    return RectPattern(n1, n2, std::move(edges));
  } catch (const Error& e) {
    raise(ErrorCode::Parse, e.what());
  }
}

Pattern parse_pattern(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_pattern(in);
}

Pattern read_pattern_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::Io, "cannot open " + path.string());
  return parse_pattern(in);
}

void write_pattern(std::ostream& out, const Pattern& p) {
  if (const auto* g = std::get_if<GramPattern>(&p)) {
    out << "kind gram\nsize " << g->n() << "\nedges " << g->m() << '\n';
    for (const Edge& e : g->edges()) out << e.a + 1 << ' ' << e.b + 1 << '\n';
  } else {
    const auto& r = std::get<RectPattern>(p);
    out << "kind rect\nsize " << r.n1() << ' ' << r.n2() << "\nedges " << r.m() << '\n';
    for (const Edge& e : r.edges()) out << e.a + 1 << ' ' << e.b + 1 << '\n';
  }
}

std::string format_pattern(const Pattern& p) {
  std::ostringstream out;
  write_pattern(out, p);
  return out.str();
}

}  // namespace unicomp
