#include "onn/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "onn/error.hpp"
#include "onn/kernels.hpp"
#include "onn/union_find.hpp"

namespace onn {

double CurvatureField::at(Index u, Index v) const {
  if (u > v) std::swap(u, v);
  auto it = std::lower_bound(edges.begin(), edges.end(), Edge{u, v, 0.0}, [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  if (it == edges.end() || it->u != u || it->v != v) {
    throw Error(ErrorCode::EdgeNotFound, "(" + std::to_string(u) + "," + std::to_string(v) + ")");
  }
  return kappa[static_cast<std::size_t>(it - edges.begin())];
}

double CurvatureField::min() const {
  return kappa.empty() ? 0.0 : *std::min_element(kappa.begin(), kappa.end());
}

CurvatureField forman_curvature(const WeightedGraph& g, double kappa_min_target) {
  for (Index i = 0; i < g.node_count(); ++i) {
    if (g.degree(i) <= 0.0) throw Error(ErrorCode::IsolatedNode, "node " + std::to_string(i));
  }
  CurvatureField field;
  field.edges.assign(g.edges().begin(), g.edges().end());
  field.kappa = kernels::forman(g);
  field.kappa_min_target = kappa_min_target;
  return field;
}

double ricci_hinge(double kappa, const RicciLossSpec& spec) {
  if (spec.variant == RicciVariant::HingeZero) return std::max(0.0, -kappa);
  const double gap = std::max(0.0, spec.kappa_min - kappa);
  return gap * gap;
}

double ricci_loss(const CurvatureField& field, const RicciLossSpec& spec) {
  double acc = 0.0;
  for (double k : field.kappa) acc += ricci_hinge(k, spec);
  return acc;
}

double ricci_loss(const WeightedGraph& g, const RicciLossSpec& spec) {
  return ricci_loss(forman_curvature(g, spec.kappa_min), spec);
}

ThresholdSelection ricci_threshold_edges(const WeightedGraph& g, double target_degree) {
  if (!is_connected(g)) throw Error(ErrorCode::Disconnected, "curvature threshold on a disconnected graph");
  const auto field = forman_curvature(g);
  const auto edges = g.edges();
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Canonical edge order is lexicographic, so a stable sort on curvature
  // breaks ties lexicographically.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return field.kappa[a] > field.kappa[b]; });

  const double want = std::ceil(std::max(0.0, target_degree) * static_cast<double>(g.node_count()) / 2.0);
  const std::size_t quota = std::min(edges.size(), static_cast<std::size_t>(want));

  UnionFind uf(g.node_count());
  std::vector<char> kept(edges.size(), 0);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::size_t k = order[rank];
    const bool merges = uf.unite(edges[k].u, edges[k].v);
    if (rank < quota || merges) kept[k] = 1;
  }

  ThresholdSelection sel;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (kept[k]) sel.keep.push_back(edges[k]);
  }
  if (quota < order.size()) {
    sel.threshold = field.kappa[order[quota]];
  } else if (!order.empty()) {
    sel.threshold = std::nextafter(field.kappa[order.back()], -std::numeric_limits<double>::infinity());
  }
  return sel;
}

void write_curvature_csv(std::ostream& out, const CurvatureField& field) {
  out << "u,v,kappa\n";
  for (std::size_t k = 0; k < field.edges.size(); ++k) {
    out << field.edges[k].u << ',' << field.edges[k].v << ',' << format_double(field.kappa[k]) << '\n';
  }
}

}  // namespace onn
