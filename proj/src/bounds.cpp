#include "onn/bounds.hpp"

#include <cmath>
#include <limits>

#include "onn/error.hpp"
#include "onn/homology.hpp"
#include "onn/spectrum.hpp"

namespace onn {

double spectral_lower_bound(Index n, Index diam) {
  if (n < 2 || diam < 1) throw Error(ErrorCode::InvalidParams, "spectral bound needs n >= 2 and diam >= 1");
  const auto nd = static_cast<double>(n) * static_cast<double>(diam);
  return 4.0 / (nd * nd);
}

double spectral_lower_bound(const WeightedGraph& g) { return spectral_lower_bound(g.node_count(), hop_diameter(g)); }

double info_iterations(double n, double delta, double epsilon) {
  if (!(n >= 1.0) || !(delta > 0.0 && delta <= 1.0) || !(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::InvalidParams, "info_iterations needs n >= 1, 0 < delta <= 1, 0 < epsilon < 1");
  }
  const double bits = std::log(1.0 / epsilon);
  if (!(bits > 0.0)) return std::numeric_limits<double>::infinity();
  return n / (delta * bits);
}

Index min_edges(Index n, Index beta0, Index genus) {
  if (beta0 < 1 || n < beta0) throw Error(ErrorCode::InvalidParams, "min_edges needs 1 <= beta0 <= n");
  return n - beta0 + genus;
}

Index laman_edges(Index n, Index dim) {
  if (dim < 1 || n < dim + 1) throw Error(ErrorCode::InvalidParams, "laman_edges needs n >= dim + 1");
  return dim * n - dim * (dim + 1) / 2;
}

Rigidity classify_rigidity(Index edges, Index n, Index dim) {
  const Index laman = laman_edges(n, dim);
  if (edges < laman) return Rigidity::Underconstrained;
  if (edges == laman) return Rigidity::MinimallyRigid;
  return Rigidity::Overconstrained;
}

std::string to_string(Rigidity r) {
  switch (r) {
    case Rigidity::Underconstrained:
      return "underconstrained";
    case Rigidity::MinimallyRigid:
      return "minimally_rigid";
    case Rigidity::Overconstrained:
      return "overconstrained";
  }
  return "unknown";
}

OracleCost oracle_cost(double n, double d, double k) {
  if (!(n > 0.0 && d > 0.0 && k > 0.0)) throw Error(ErrorCode::InvalidParams, "oracle_cost needs positive arguments");
  return {k * n * d + n * d * d, n * n * d};
}

LimitReport limit_report(const WeightedGraph& g, const LimitInputs& in) {
  LimitReport r;
  r.n = g.node_count();
  r.edges = g.edge_count();
  r.diameter = hop_diameter(g);
  const BettiPair b = betti(g);
  r.beta0 = b.beta0;
  r.beta1 = b.beta1;
  r.lambda2 = spectrum(g).lambda2;
  r.spectral_lower = spectral_lower_bound(r.n, r.diameter);
  r.info_iterations = info_iterations(static_cast<double>(r.n), in.delta, in.epsilon);
  r.min_edges = min_edges(r.n, r.beta0, r.beta1);
  r.laman_edges = laman_edges(r.n, in.laman_dim);
  r.rigidity = classify_rigidity(r.edges, r.n, in.laman_dim);
  r.mean_degree = 2.0 * static_cast<double>(r.edges) / static_cast<double>(r.n);
  const OracleCost c = oracle_cost(static_cast<double>(r.n), static_cast<double>(in.dim), r.mean_degree);
  r.oracle_sparse_flops = c.sparse_flops;
  r.oracle_dense_flops = c.dense_flops;
  return r;
}

}  // namespace onn
