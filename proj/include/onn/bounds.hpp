#pragma once

#include <string>

#include "onn/graph.hpp"

namespace onn {

// 4 / (n^2 diam^2). Errors: InvalidParams unless n >= 2 and diam >= 1.
double spectral_lower_bound(Index n, Index diam);
// Same bound with the hop diameter of g. Errors: Disconnected.
double spectral_lower_bound(const WeightedGraph& g);

// n / (delta ln(1/epsilon)); +infinity when ln(1/epsilon) underflows to 0.
double info_iterations(double n, double delta, double epsilon);

// n - beta0 + genus.
Index min_edges(Index n, Index beta0, Index genus);

// dim n - C(dim + 1, 2).
Index laman_edges(Index n, Index dim);

enum class Rigidity { Underconstrained, MinimallyRigid, Overconstrained };
Rigidity classify_rigidity(Index edges, Index n, Index dim);
std::string to_string(Rigidity r);

struct OracleCost {
  double sparse_flops = 0.0;  // k n d + n d^2
  double dense_flops = 0.0;   // n^2 d
};
OracleCost oracle_cost(double n, double d, double k);

struct LimitInputs {
  double delta = 0.6;
  double epsilon = 1e-3;
  Index dim = 1;         // semantic dimension d for the oracle estimate
  Index laman_dim = 2;
};

// Measured quantities of g next to the closed-form limits.
struct LimitReport {
  Index n = 0;
  Index edges = 0;
  Index diameter = 0;
  Index beta0 = 0;
  Index beta1 = 0;
  double lambda2 = 0.0;
  double spectral_lower = 0.0;
  double info_iterations = 0.0;
  Index min_edges = 0;
  Index laman_edges = 0;
  Rigidity rigidity = Rigidity::Underconstrained;
  double mean_degree = 0.0;
  double oracle_sparse_flops = 0.0;
  double oracle_dense_flops = 0.0;
};

// Errors: Disconnected, InvalidParams.
LimitReport limit_report(const WeightedGraph& g, const LimitInputs& in = {});

}  // namespace onn
