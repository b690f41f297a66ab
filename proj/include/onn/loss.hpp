#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "onn/curvature.hpp"
#include "onn/graph.hpp"
#include "onn/homology.hpp"
#include "onn/kernels.hpp"

namespace onn {

// N x d node embeddings; row i is the embedding of node i.
class SemanticState {
 public:
  SemanticState() = default;
  // Errors: InvalidDimension for an empty shape, InvalidParams for
  // non-finite entries.
  explicit SemanticState(StateMatrix values);

  Index n() const noexcept { return static_cast<Index>(values_.rows()); }
  Index d() const noexcept { return static_cast<Index>(values_.cols()); }
  const StateMatrix& values() const noexcept { return values_; }
  StateMatrix& mutable_values() noexcept { return values_; }

 private:
  StateMatrix values_;
};

// The PSD operator L1 of the connection loss tr(S^T L1 S).
class ConnectionOperator {
 public:
  enum class Kind { Zero, ScaledLaplacian, UserMatrix };

  static ConnectionOperator zero() { return {}; }
  // lambda * L_G of whatever graph the loss is evaluated on.
  static ConnectionOperator scaled_laplacian(double lambda);
  // Symmetric n x n matrix; errors: InvalidParams when not symmetric.
  static ConnectionOperator user_matrix(Eigen::MatrixXd m);

  Kind kind() const noexcept { return kind_; }
  double scale() const noexcept { return scale_; }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }

  // out = L1 x.
  void apply(const WeightedGraph& g, const StateMatrix& x, StateMatrix& out) const;
  // Spectral norm of L1 on graph g.
  double norm(const WeightedGraph& g) const;
  bool is_zero() const noexcept { return kind_ == Kind::Zero || (kind_ == Kind::ScaledLaplacian && scale_ == 0.0); }

 private:
  Kind kind_ = Kind::Zero;
  double scale_ = 0.0;
  Eigen::MatrixXd matrix_;
};

struct LossConfig {
  RicciLossSpec ricci{};
  double lambda_ricci = 1.0;
  double lambda_homology = 1.0;
  // Curvature-consistency term ||F(A) - F_target||_F^2 + rho mean(relu(kappa_min - kappa))
  // with F_target = 0; folded into the ricci component when its weight is
  // nonzero.
  double lambda_curv = 0.0;
  double curv_rho = 0.0;
  BettiPair betti_targets{1, 0};
  ConnectionOperator connection{};
};

// total = ((consensus + connection) + ricci) + homology, in that order.
struct LossBreakdown {
  double consensus = 0.0;
  double connection = 0.0;
  double ricci = 0.0;
  double homology = 0.0;
  double total = 0.0;
};

// 1/2 sum_{(i,j)} w_ij ||S_i - S_j||^2 (edge sum). Errors: DimensionMismatch.
double consensus_loss(const SemanticState& s, const WeightedGraph& g);
// 1/2 tr(S^T L S) through the Laplacian product; the second route.
double consensus_loss_trace(const SemanticState& s, const WeightedGraph& g);
// tr(S^T L1 S). Errors: DimensionMismatch, NotPSD on a negative value.
double connection_loss(const SemanticState& s, const ConnectionOperator& l1, const WeightedGraph& g);
double connection_loss(const SemanticState& s, const Eigen::MatrixXd& l1);

// Weighted ricci + curvature-consistency + homology terms; independent of S.
struct TopologyLoss {
  double ricci = 0.0;
  double homology = 0.0;
  double total() const { return ricci + homology; }
};
TopologyLoss topology_loss(const WeightedGraph& g, const LossConfig& cfg);
double curvature_consistency_loss(const CurvatureField& field, double rho, double kappa_min);

LossBreakdown total_loss(const SemanticState& s, const WeightedGraph& g, const LossConfig& cfg);

// (L_G + 2 L1) S. Errors: DimensionMismatch.
StateMatrix grad_s(const SemanticState& s, const WeightedGraph& g, const ConnectionOperator& l1 = {});

// Explicit class-K-infinity certificate for a target topology.
struct LyapunovCertificate {
  double mu = 0.0;          // lambda2 of the target combinatorial Laplacian
  double L = 0.0;           // lambda_max of the target combinatorial Laplacian
  double c_topo = 0.0;      // sampled topology-loss Lipschitz bound
  double connection_norm = 0.0;
  double gershgorin_bound = 0.0;  // 2 * max weighted degree, >= L
  std::size_t samples = 0;
  double radius = 1.0;

  double alpha1(double r) const { return 0.5 * mu * r * r; }
  double alpha2(double r) const { return 0.5 * (L + 2.0 * connection_norm) * r * r + c_topo * r; }
};

// c_topo = max over `samples` random weight perturbations A of the target
// (same edge set, positive weights, ||A - A*||_F <= radius) of
// |topo(A) - topo(A*)| / ||A - A*||_F. Errors: Disconnected.
LyapunovCertificate certificate(const WeightedGraph& target, const LossConfig& cfg, std::size_t samples = 64,
                                double radius = 1.0, std::uint64_t seed = 0);

// ||A - B||_F over the union of both edge sets (each undirected edge
// contributes twice, once per matrix entry).
double adjacency_distance(const WeightedGraph& a, const WeightedGraph& b);

}  // namespace onn
