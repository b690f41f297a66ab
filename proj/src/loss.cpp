#include "onn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "onn/error.hpp"
#include "onn/rng.hpp"
#include "onn/spectrum.hpp"

namespace onn {

SemanticState::SemanticState(StateMatrix values) : values_(std::move(values)) {
  if (values_.rows() == 0 || values_.cols() == 0) {
    throw Error(ErrorCode::InvalidDimension, "semantic state must be non-empty");
  }
  if (!values_.allFinite()) throw Error(ErrorCode::InvalidParams, "semantic state has non-finite entries");
}

ConnectionOperator ConnectionOperator::scaled_laplacian(double lambda) {
  if (!(lambda >= 0.0)) throw Error(ErrorCode::NotPSD, "scaled Laplacian needs lambda >= 0");
  ConnectionOperator op;
  op.kind_ = Kind::ScaledLaplacian;
  op.scale_ = lambda;
  return op;
}

ConnectionOperator ConnectionOperator::user_matrix(Eigen::MatrixXd m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "L1 must be square");
  if (m.size() > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::InvalidParams, "L1 must be symmetric");
  }
  ConnectionOperator op;
  op.kind_ = Kind::UserMatrix;
  op.scale_ = 1.0;
  op.matrix_ = std::move(m);
  return op;
}

void ConnectionOperator::apply(const WeightedGraph& g, const StateMatrix& x, StateMatrix& out) const {
  switch (kind_) {
    case Kind::Zero:
      out = StateMatrix::Zero(x.rows(), x.cols());
      return;
    case Kind::ScaledLaplacian:
      kernels::laplacian_apply(g, x, out);
      out *= scale_;
      return;
    case Kind::UserMatrix:
      if (matrix_.rows() != x.rows()) throw Error(ErrorCode::DimensionMismatch, "L1 size vs state rows");
      out = matrix_ * x;
      return;
  }
}

double ConnectionOperator::norm(const WeightedGraph& g) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::ScaledLaplacian:
      return g.node_count() < 2 ? 0.0 : scale_ * spectrum(g).lambda_max;
    case Kind::UserMatrix: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix_, Eigen::EigenvaluesOnly);
      return es.eigenvalues().cwiseAbs().maxCoeff();
    }
  }
  return 0.0;
}

namespace {

void require_rows(const SemanticState& s, const WeightedGraph& g) {
  if (s.n() != g.node_count()) {
    throw Error(ErrorCode::DimensionMismatch,
                "state has " + std::to_string(s.n()) + " rows, graph has " + std::to_string(g.node_count()) + " nodes");
  }
}

// sum_i <x_i, y_i> in row order.
double frobenius_inner(const StateMatrix& x, const StateMatrix& y) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) acc += x.row(i).dot(y.row(i));
  return acc;
}

}  // namespace

double consensus_loss(const SemanticState& s, const WeightedGraph& g) {
  require_rows(s, g);
  return kernels::edge_energy(g, s.values());
}

double consensus_loss_trace(const SemanticState& s, const WeightedGraph& g) {
  require_rows(s, g);
  StateMatrix ls;
  kernels::laplacian_apply(g, s.values(), ls);
  return 0.5 * frobenius_inner(s.values(), ls);
}

double connection_loss(const SemanticState& s, const ConnectionOperator& l1, const WeightedGraph& g) {
  require_rows(s, g);
  if (l1.is_zero()) return 0.0;
  StateMatrix out;
  l1.apply(g, s.values(), out);
  const double q = frobenius_inner(s.values(), out);
  const double scale = std::max(1.0, s.values().squaredNorm());
  if (q < -1e-12 * scale) throw Error(ErrorCode::NotPSD, "negative Rayleigh quotient in connection loss");
  return std::max(0.0, q);
}

double connection_loss(const SemanticState& s, const Eigen::MatrixXd& l1) {
  if (l1.rows() != static_cast<Eigen::Index>(s.n())) throw Error(ErrorCode::DimensionMismatch, "L1 size");
  const StateMatrix out = l1 * s.values();
  const double q = frobenius_inner(s.values(), out);
  if (q < -1e-12 * std::max(1.0, s.values().squaredNorm())) {
    throw Error(ErrorCode::NotPSD, "negative Rayleigh quotient in connection loss");
  }
  return std::max(0.0, q);
}

double curvature_consistency_loss(const CurvatureField& field, double rho, double kappa_min) {
  double frob = 0.0;
  double relu = 0.0;
  for (double k : field.kappa) {
    frob += 2.0 * k * k;  // both (i,j) and (j,i) entries of F
    relu += std::max(0.0, kappa_min - k);
  }
  const double mean = field.kappa.empty() ? 0.0 : relu / static_cast<double>(field.kappa.size());
  return frob + rho * mean;
}

TopologyLoss topology_loss(const WeightedGraph& g, const LossConfig& cfg) {
  TopologyLoss t;
  if (g.edge_count() > 0 && (cfg.lambda_ricci != 0.0 || cfg.lambda_curv != 0.0)) {
    // Isolated nodes carry no edges and thus no curvature terms.
    bool isolated = false;
    for (double d : g.degrees()) isolated = isolated || d <= 0.0;
    CurvatureField field;
    if (isolated) {
      field.edges.assign(g.edges().begin(), g.edges().end());
      field.kappa = kernels::forman(g);
    } else {
      field = forman_curvature(g, cfg.ricci.kappa_min);
    }
    t.ricci = cfg.lambda_ricci * ricci_loss(field, cfg.ricci);
    if (cfg.lambda_curv != 0.0) {
      t.ricci += cfg.lambda_curv * curvature_consistency_loss(field, cfg.curv_rho, cfg.ricci.kappa_min);
    }
  }
  t.homology = cfg.lambda_homology * homology_loss(g, cfg.betti_targets);
  return t;
}

LossBreakdown total_loss(const SemanticState& s, const WeightedGraph& g, const LossConfig& cfg) {
  LossBreakdown b;
  b.consensus = consensus_loss(s, g);
  b.connection = connection_loss(s, cfg.connection, g);
  const TopologyLoss t = topology_loss(g, cfg);
  b.ricci = t.ricci;
  b.homology = t.homology;
  b.total = ((b.consensus + b.connection) + b.ricci) + b.homology;
  return b;
}

StateMatrix grad_s(const SemanticState& s, const WeightedGraph& g, const ConnectionOperator& l1) {
  require_rows(s, g);
  StateMatrix grad;
  kernels::laplacian_apply(g, s.values(), grad);
  if (!l1.is_zero()) {
    StateMatrix conn;
    l1.apply(g, s.values(), conn);
    grad += 2.0 * conn;
  }
  return grad;
}

double adjacency_distance(const WeightedGraph& a, const WeightedGraph& b) {
  std::map<std::pair<Index, Index>, double> diff;
  for (const Edge& e : a.edges()) diff[{e.u, e.v}] += e.w;
  for (const Edge& e : b.edges()) diff[{e.u, e.v}] -= e.w;
  double acc = 0.0;
  for (const auto& [key, d] : diff) acc += 2.0 * d * d;
  return std::sqrt(acc);
}

LyapunovCertificate certificate(const WeightedGraph& target, const LossConfig& cfg, std::size_t samples,
                                double radius, std::uint64_t seed) {
  if (!is_connected(target)) throw Error(ErrorCode::Disconnected, "certificate target must be connected");
  if (target.node_count() < 2) throw Error(ErrorCode::InvalidParams, "certificate target needs n >= 2");
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidParams, "radius must be positive");
  LyapunovCertificate cert;
  const Spectrum sp = spectrum(target);
  cert.mu = sp.lambda2;
  cert.L = sp.lambda_max;
  cert.connection_norm = cfg.connection.norm(target);
  for (double d : target.degrees()) cert.gershgorin_bound = std::max(cert.gershgorin_bound, 2.0 * d);
  cert.samples = samples;
  cert.radius = radius;

  const double base = topology_loss(target, cfg).total();
  CounterRng rng(seed, streams::kCertificate);
  const auto edges = target.edges();
  std::vector<Edge> perturbed(edges.begin(), edges.end());
  for (std::size_t k = 0; k < samples; ++k) {
    // Random direction on the existing edges, Frobenius radius drawn in
    // (0, radius]; weights stay strictly positive so the edge set and hence
    // the Betti numbers are unchanged.
    std::vector<double> dir(edges.size());
    double norm2 = 0.0;
    for (double& x : dir) {
      x = rng.normal();
      norm2 += 2.0 * x * x;
    }
    const double scale = radius * (1.0 - rng.uniform()) / std::sqrt(std::max(norm2, 1e-300));
    for (std::size_t e = 0; e < edges.size(); ++e) {
      perturbed[e].w = std::max(edges[e].w + scale * dir[e], 1e-6 * edges[e].w);
    }
    const WeightedGraph g = build_graph(target.node_count(), perturbed);
    const double dist = adjacency_distance(g, target);
    if (dist <= 0.0) continue;
    const double quotient = std::abs(topology_loss(g, cfg).total() - base) / dist;
    cert.c_topo = std::max(cert.c_topo, quotient);
  }
  return cert;
}

}  // namespace onn
