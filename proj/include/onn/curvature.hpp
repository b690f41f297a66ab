#pragma once

#include <iosfwd>
#include <vector>

#include "onn/graph.hpp"

namespace onn {

// Forman-Ricci curvature on the edge set of a graph, in the graph's
// canonical edge order.
struct CurvatureField {
  std::vector<Edge> edges;
  std::vector<double> kappa;
  double kappa_min_target = 0.0;

  // Curvature of edge {u, v}; throws EdgeNotFound.
  double at(Index u, Index v) const;
  double min() const;
};

// kappa(i,j) = w_ij (1/sqrt(d_i) + 1/sqrt(d_j))
//              - sum_{k~i, k!=j} w_ik / sqrt(d_k) - sum_{l~j, l!=i} w_jl / sqrt(d_l)
// Errors: IsolatedNode.
CurvatureField forman_curvature(const WeightedGraph& g, double kappa_min_target = 0.0);

enum class RicciVariant { HingeZero, HingeTarget };

struct RicciLossSpec {
  RicciVariant variant = RicciVariant::HingeZero;
  double kappa_min = 0.0;
  // Weight of the boundary term; the term itself is identically zero.
  double lambda_boundary = 0.0;
};

// HingeZero:   sum_e max(0, -kappa_e)
// HingeTarget: sum_e max(0, kappa_min - kappa_e)^2
double ricci_loss(const CurvatureField& field, const RicciLossSpec& spec = {});
double ricci_loss(const WeightedGraph& g, const RicciLossSpec& spec = {});

// Single-edge hinge used by both the total and the incremental evaluations.
double ricci_hinge(double kappa, const RicciLossSpec& spec);

struct ThresholdSelection {
  std::vector<Edge> keep;  // canonical (u, v) order
  double threshold = 0.0;
};

// Keeps the ceil(k n / 2) highest-curvature edges (ties in lexicographic
// edge order) and every further edge a highest-curvature-first Kruskal pass
// needs to stay connected. Errors: Disconnected.
ThresholdSelection ricci_threshold_edges(const WeightedGraph& g, double target_degree);

// CSV `u,v,kappa` sorted by (u, v).
void write_curvature_csv(std::ostream& out, const CurvatureField& field);

}  // namespace onn
