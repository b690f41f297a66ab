#include "onn/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>

#include "onn/error.hpp"
#include "onn/union_find.hpp"

namespace onn {

WeightedGraph build_graph(Index n, std::span<const Edge> edge_list) {
  std::vector<Edge> edges;
  edges.reserve(edge_list.size());
  for (const Edge& e : edge_list) {
    if (e.u >= n || e.v >= n) {
      throw Error(ErrorCode::IndexOutOfRange, "edge (" + std::to_string(e.u) + "," +
                                                  std::to_string(e.v) + ") with n=" + std::to_string(n));
    }
    if (e.u == e.v) throw Error(ErrorCode::SelfLoop, "node " + std::to_string(e.u));
    if (!(e.w >= 0.0) || !std::isfinite(e.w)) {
      throw Error(ErrorCode::NegativeWeight, "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    }
    edges.push_back(e.u < e.v ? e : Edge{e.v, e.u, e.w});
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v) {
      throw Error(ErrorCode::DuplicateEdge,
                  "(" + std::to_string(edges[i].u) + "," + std::to_string(edges[i].v) + ")");
    }
  }
  std::erase_if(edges, [](const Edge& e) { return e.w == 0.0; });

  WeightedGraph g;
  g.n_ = n;
  g.edges_ = std::move(edges);
  g.degree_ = g.recompute_degrees();

  std::vector<Index> count(n + 1, 0);
  for (const Edge& e : g.edges_) {
    ++count[e.u + 1];
    ++count[e.v + 1];
  }
  for (Index i = 0; i < n; ++i) count[i + 1] += count[i];
  g.offset_ = count;
  g.adjacency_.resize(2 * g.edges_.size());
  std::vector<Index> cursor(count.begin(), count.end() - 1);
  // Edges are sorted by (u, v): for a fixed node the smaller neighbors arrive
  // through the v-side before any larger neighbor arrives through the u-side,
  // so both passes together yield sorted adjacency.
  for (const Edge& e : g.edges_) g.adjacency_[cursor[e.v]++] = {e.u, e.w};
  for (const Edge& e : g.edges_) g.adjacency_[cursor[e.u]++] = {e.v, e.w};
  return g;
}

std::vector<double> WeightedGraph::recompute_degrees() const {
  std::vector<double> deg(n_, 0.0);
  for (const Edge& e : edges_) {
    deg[e.u] += e.w;
    deg[e.v] += e.w;
  }
  return deg;
}

double WeightedGraph::weight(Index u, Index v) const {
  if (u >= n_ || v >= n_) return 0.0;
  auto nb = neighbors(u);
  auto it = std::lower_bound(nb.begin(), nb.end(), v,
                             [](const Neighbor& a, Index key) { return a.node < key; });
  return (it != nb.end() && it->node == v) ? it->w : 0.0;
}

bool WeightedGraph::has_edge(Index u, Index v) const { return weight(u, v) > 0.0; }

double WeightedGraph::total_weight() const {
  double s = 0.0;
  for (const Edge& e : edges_) s += e.w;
  return s;
}

Eigen::MatrixXd adjacency_matrix(const WeightedGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    a(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)) = e.w;
    a(static_cast<Eigen::Index>(e.v), static_cast<Eigen::Index>(e.u)) = e.w;
  }
  return a;
}

Eigen::MatrixXd laplacian(const WeightedGraph& g) {
  Eigen::MatrixXd l = -adjacency_matrix(g);
  for (Index i = 0; i < g.node_count(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    l(ii, ii) = g.degree(i);
  }
  return l;
}

Eigen::MatrixXd normalized_laplacian(const WeightedGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::VectorXd inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = g.degree(static_cast<Index>(i));
    if (d <= 0.0) throw Error(ErrorCode::IsolatedNode, "node " + std::to_string(i));
    inv_sqrt(i) = 1.0 / std::sqrt(d);
  }
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n);
  for (const Edge& e : g.edges()) {
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    const double x = -e.w * inv_sqrt(u) * inv_sqrt(v);
    l(u, v) = x;
    l(v, u) = x;
  }
  return l;
}

std::vector<Index> component_labels(const WeightedGraph& g) {
  UnionFind uf(g.node_count());
  for (const Edge& e : g.edges()) uf.unite_min_root(e.u, e.v);
  std::vector<Index> label(g.node_count());
  for (Index i = 0; i < g.node_count(); ++i) label[i] = uf.find(i);
  return label;
}

Index component_count(const WeightedGraph& g) {
  UnionFind uf(g.node_count());
  for (const Edge& e : g.edges()) uf.unite(e.u, e.v);
  return uf.set_count();
}

bool is_connected(const WeightedGraph& g) { return g.node_count() > 0 && component_count(g) == 1; }

Index hop_diameter(const WeightedGraph& g) {
  if (!is_connected(g)) throw Error(ErrorCode::Disconnected, "diameter of a disconnected graph");
  const Index n = g.node_count();
  Index diam = 0;
  std::vector<Index> dist(n);
  constexpr Index kUnseen = static_cast<Index>(-1);
  for (Index s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), kUnseen);
    std::queue<Index> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const Index x = q.front();
      q.pop();
      diam = std::max(diam, dist[x]);
      for (const Neighbor& nb : g.neighbors(x)) {
        if (dist[nb.node] == kUnseen) {
          dist[nb.node] = dist[x] + 1;
          q.push(nb.node);
        }
      }
    }
  }
  return diam;
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

bool parse_index(std::string_view tok, Index& out) {
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

bool parse_double(std::string_view tok, double& out) {
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

[[noreturn]] void format_error(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::FileFormat, "line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

WeightedGraph read_graph(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  Index n = 0;
  bool have_header = false;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (!have_header) {
      if (tok.size() != 3 || tok[0] != "onn-graph" || tok[1] != "v1" || !parse_index(tok[2], n)) {
        format_error(line_no, "expected header 'onn-graph v1 <n>'");
      }
      have_header = true;
      continue;
    }
    Edge e{};
    if (tok.size() != 3 || !parse_index(tok[0], e.u) || !parse_index(tok[1], e.v) || !parse_double(tok[2], e.w)) {
      format_error(line_no, "expected 'u v w'");
    }
    edges.push_back(e);
  }
  if (!have_header) format_error(line_no, "missing header");
  try {
    return build_graph(n, edges);
  } catch (const Error& err) {
    throw Error(ErrorCode::FileFormat, err.what());
  }
}

WeightedGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileFormat, "cannot open " + path);
  return read_graph(in);
}

void write_graph(std::ostream& out, const WeightedGraph& g) {
  out << "onn-graph v1 " << g.node_count() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << ' ' << format_double(e.w) << '\n';
}

void save_graph(const std::string& path, const WeightedGraph& g) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::FileFormat, "cannot write " + path);
  write_graph(out, g);
}

}  // namespace onn
