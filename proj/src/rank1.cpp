#include "unicomp/rank1.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "unicomp/error.hpp"

namespace unicomp {

namespace {

constexpr double kConsistencyTol = 1e-8;
constexpr double kZeroEntryTol = 1e-12;
constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();

using Adjacency = std::vector<std::vector<std::uint32_t>>;

// Neighbor lists in ascending order; a self loop lists the vertex itself.
Adjacency gram_adjacency(const GramPattern& p) {
  Adjacency adj(p.n());
  for (const Edge& e : p.edges()) {
    adj[e.a].push_back(e.b);
    if (!e.self_loop()) adj[e.b].push_back(e.a);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

// BFS two-coloring of one component; false when an edge joins equal colors.
bool two_color(const Adjacency& adj, std::size_t root, std::vector<std::size_t>& color) {
  bool ok = true;
  std::deque<std::size_t> queue{root};
  color[root] = 0;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::uint32_t w : adj[v]) {
      if (color[w] == kUnset) {
        color[w] = 1 - color[v];
        queue.push_back(w);
      } else if (color[w] == color[v]) {
        ok = false;
      }
    }
  }
  return ok;
}

}  // namespace

Rank1Verdict check_gram_rank1(const GramPattern& pattern) {
  const Adjacency adj = gram_adjacency(pattern);
  const Components comps = connected_components(pattern);
  std::vector<std::size_t> slot(pattern.n());
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (std::size_t v : comps[c]) slot[v] = c;
  }

  Rank1Verdict out;
  out.components.resize(comps.size());
  for (std::size_t c = 0; c < comps.size(); ++c) out.components[c].vertices = comps[c];
  for (const Edge& e : pattern.edges()) {
    auto& diag = out.components[slot[e.a]];
    ++diag.edge_count;
    if (e.self_loop()) diag.has_self_loop = true;
  }
  std::vector<std::size_t> color(pattern.n(), kUnset);
  for (auto& diag : out.components) diag.bipartite = two_color(adj, diag.vertices.front(), color);

  out.locally = true;
  out.minimally_locally = true;
  for (const auto& diag : out.components) {
    out.locally = out.locally && !diag.bipartite;
    out.minimally_locally =
        out.minimally_locally && !diag.bipartite && diag.edge_count == diag.vertices.size();
  }
  const bool connected = out.components.size() == 1;
  out.globally = connected && out.locally;
  out.minimally_globally = connected && out.minimally_locally;
  return out;
}

Rank1Verdict check_rect_rank1(const RectPattern& pattern) {
  const Components comps = connected_components(pattern);
  std::vector<std::size_t> slot(pattern.vertex_count());
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (std::size_t v : comps[c]) slot[v] = c;
  }
  Rank1Verdict out;
  out.components.resize(comps.size());
  for (std::size_t c = 0; c < comps.size(); ++c) out.components[c].vertices = comps[c];
  for (const Edge& e : pattern.edges()) ++out.components[slot[e.a]].edge_count;

  const bool connected = comps.size() == 1;
  out.locally = connected;
  out.globally = connected;
  out.minimally_locally = connected && pattern.m() + 1 == pattern.vertex_count();
  out.minimally_globally = out.minimally_locally;
  return out;
}

DenseMatrix cycle_matrix(std::span<const double> points) {
  const auto l = static_cast<Eigen::Index>(points.size());
  if (l < 1) raise(ErrorCode::InvalidArgument, "cycle needs at least one vertex");
  DenseMatrix c = DenseMatrix::Zero(l, l);
  for (Eigen::Index i = 0; i < l; ++i) {
    const Eigen::Index next = (i + 1) % l;
    c(i, i) += points[static_cast<std::size_t>(next)];
    c(i, next) += points[static_cast<std::size_t>(i)];
  }
  return c;
}

double cycle_determinant(std::span<const double> points) {
  if (points.empty()) raise(ErrorCode::InvalidArgument, "cycle needs at least one vertex");
  if (points.size() % 2 == 0) return 0.0;
  double prod = 2.0;
  for (double p : points) prod *= p;
  return prod;
}

Rank1Values parse_values(std::istream& in) {
  Rank1Values out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    long long i = 0, j = 0;
    double value = 0.0;
    std::string extra;
    if (!(ss >> i >> j >> value)) {
      raise(ErrorCode::Parse, "line " + std::to_string(lineno) + ": expected 'i j value'");
    }
    if (ss >> extra) {
      raise(ErrorCode::Parse, "line " + std::to_string(lineno) + ": unexpected trailing token '" + extra + "'");
    }
    if (i < 1 || j < 1 || i > std::numeric_limits<std::uint32_t>::max() ||
        j > std::numeric_limits<std::uint32_t>::max()) {
      raise(ErrorCode::Parse, "line " + std::to_string(lineno) + ": index out of range");
    }
    if (!std::isfinite(value)) raise(ErrorCode::Parse, "line " + std::to_string(lineno) + ": value is not finite");
    auto a = static_cast<std::uint32_t>(i - 1);
    auto b = static_cast<std::uint32_t>(j - 1);
    if (a > b) std::swap(a, b);
    if (!out.emplace(Edge{a, b}, value).second) {
      raise(ErrorCode::Parse, "line " + std::to_string(lineno) + ": duplicate entry");
    }
  }
  return out;
}

Rank1Values parse_values(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_values(in);
}

Rank1Values read_values_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::Io, "cannot open " + path.string());
  return parse_values(in);
}

Rank1Completion complete_gram_rank1(const GramPattern& pattern, const Rank1Values& values) {
  if (values.size() != pattern.m()) {
    raise(ErrorCode::InvalidArgument, "expected " + std::to_string(pattern.m()) + " values, got " +
                                          std::to_string(values.size()));
  }
  std::vector<double> j;
  j.reserve(pattern.m());
  double max_abs = 0.0;
  for (const Edge& e : pattern.edges()) {
    const auto it = values.find(e);
    if (it == values.end()) {
      raise(ErrorCode::InvalidArgument,
            "no value for entry (" + std::to_string(e.a + 1) + ", " + std::to_string(e.b + 1) + ")");
    }
    j.push_back(it->second);
    max_abs = std::max(max_abs, std::abs(it->second));
  }
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (j[k] == 0.0 || std::abs(j[k]) < kZeroEntryTol * max_abs) {
      const Edge& e = pattern.edges()[k];
      raise(ErrorCode::ZeroEntry,
            "entry (" + std::to_string(e.a + 1) + ", " + std::to_string(e.b + 1) + ") is zero");
    }
  }

  // Incident (neighbor, edge index) lists, ascending by neighbor.
  std::vector<std::vector<std::pair<std::uint32_t, std::size_t>>> inc(pattern.n());
  for (std::size_t k = 0; k < pattern.m(); ++k) {
    const Edge& e = pattern.edges()[k];
    inc[e.a].push_back({e.b, k});
    if (!e.self_loop()) inc[e.b].push_back({e.a, k});
  }
  for (auto& list : inc) std::sort(list.begin(), list.end());

  Rank1Completion out;
  out.components = connected_components(pattern);
  out.points = Vector::Zero(static_cast<Eigen::Index>(pattern.n()));

  // Along a BFS tree q_v = s_v t + c_v with s_v = +-1; b_v is the sign bit.
  std::vector<int> s(pattern.n(), 0);
  std::vector<double> c(pattern.n(), 0.0);
  std::vector<int> bit(pattern.n(), 0);
  std::vector<std::size_t> slot(pattern.n());
  for (std::size_t comp = 0; comp < out.components.size(); ++comp) {
    const std::size_t root = out.components[comp].front();
    for (std::size_t v : out.components[comp]) slot[v] = comp;
    s[root] = 1;
    std::deque<std::size_t> queue{root};
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (const auto& [w, k] : inc[v]) {
        if (s[w] != 0) continue;
        s[w] = -s[v];
        c[w] = std::log(std::abs(j[k])) - c[v];
        bit[w] = bit[v] ^ (j[k] < 0.0 ? 1 : 0);
        queue.push_back(w);
      }
    }
  }

  // The first odd-cycle edge of each component fixes t.
  std::vector<double> t(out.components.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < pattern.m(); ++k) {
    const Edge& e = pattern.edges()[k];
    const std::size_t comp = slot[e.a];
    if (!std::isnan(t[comp]) || s[e.a] != s[e.b]) continue;
    t[comp] = (std::log(std::abs(j[k])) - c[e.a] - c[e.b]) / (2.0 * s[e.a]);
  }
  for (std::size_t comp = 0; comp < out.components.size(); ++comp) {
    if (std::isnan(t[comp])) {
      raise(ErrorCode::Underdetermined, "component containing vertex " +
                                            std::to_string(out.components[comp].front() + 1) +
                                            " has no odd cycle");
    }
  }
  for (std::size_t v = 0; v < pattern.n(); ++v) {
    const double mag = std::exp(s[v] * t[slot[v]] + c[v]);
    out.points[static_cast<Eigen::Index>(v)] = bit[v] ? -mag : mag;
  }

  for (std::size_t k = 0; k < pattern.m(); ++k) {
    const Edge& e = pattern.edges()[k];
    const int want = j[k] < 0.0 ? 1 : 0;
    if ((bit[e.a] ^ bit[e.b]) != want) {
      raise(ErrorCode::SignInconsistent, "sign of entry (" + std::to_string(e.a + 1) + ", " +
                                             std::to_string(e.b + 1) + ") contradicts the others");
    }
  }
  for (std::size_t k = 0; k < pattern.m(); ++k) {
    const Edge& e = pattern.edges()[k];
    const double got = out.points[e.a] * out.points[e.b];
    if (std::abs(got - j[k]) > kConsistencyTol * std::abs(j[k])) {
      raise(ErrorCode::NotRank1Consistent, "entry (" + std::to_string(e.a + 1) + ", " +
                                               std::to_string(e.b + 1) + ") disagrees with the others");
    }
  }
  return out;
}

std::string rank1_verdict_json(const Rank1Verdict& v, PatternKind kind) {
  nlohmann::ordered_json j;
  j["minimally_locally"] = v.minimally_locally;
  j["locally"] = v.locally;
  j["minimally_globally"] = v.minimally_globally;
  j["globally"] = v.globally;
  j["kind"] = to_string(kind);
  auto comps = nlohmann::ordered_json::array();
  for (const auto& c : v.components) {
    std::vector<std::size_t> one_based(c.vertices);
    for (auto& x : one_based) ++x;
    nlohmann::ordered_json cj;
    cj["vertices"] = one_based;
    cj["edges"] = c.edge_count;
    if (kind == PatternKind::Gram) {
      cj["self_loop"] = c.has_self_loop;
      cj["bipartite"] = c.bipartite;
      cj["odd_cycle"] = !c.bipartite;
    }
    comps.push_back(std::move(cj));
  }
  j["components"] = std::move(comps);
  j["schema"] = 1;
  return j.dump();
}

std::string rank1_completion_json(const Rank1Completion& c) {
  nlohmann::ordered_json j;
  j["points"] = std::vector<double>(c.points.data(), c.points.data() + c.points.size());
  auto comps = nlohmann::ordered_json::array();
  for (const auto& comp : c.components) {
    std::vector<std::size_t> one_based(comp);
    for (auto& x : one_based) ++x;
    comps.push_back(one_based);
  }
  j["components"] = std::move(comps);
  j["note"] = "each component may be negated independently";
  j["schema"] = 1;
  return j.dump();
}

}  // namespace unicomp
