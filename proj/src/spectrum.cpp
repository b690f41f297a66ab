#include "onn/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "onn/error.hpp"
#include "onn/kernels.hpp"
#include "onn/rng.hpp"

namespace onn {

namespace {

using Operator = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

Operator make_operator(const WeightedGraph& g, LaplacianKind which) {
  if (which == LaplacianKind::Combinatorial) {
    return [&g](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
      StateMatrix xs = x;
      StateMatrix ys;
      kernels::laplacian_apply(g, xs, ys);
      y = ys.col(0);
    };
  }
  Eigen::VectorXd r(static_cast<Eigen::Index>(g.node_count()));
  for (Index i = 0; i < g.node_count(); ++i) {
    if (g.degree(i) <= 0.0) throw Error(ErrorCode::IsolatedNode, "node " + std::to_string(i));
    r(static_cast<Eigen::Index>(i)) = 1.0 / std::sqrt(g.degree(i));
  }
  return [&g, r](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    StateMatrix xs = r.cwiseProduct(x);
    StateMatrix ys;
    kernels::laplacian_apply(g, xs, ys);
    y = r.cwiseProduct(ys.col(0));
  };
}

// Unit basis of the Laplacian null space on a connected graph.
Eigen::VectorXd null_vector(const WeightedGraph& g, LaplacianKind which) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    z(i) = which == LaplacianKind::Combinatorial ? 1.0 : std::sqrt(g.degree(static_cast<Index>(i)));
  }
  return z.normalized();
}

struct RitzPair {
  double value;
  Eigen::VectorXd vector;
};

enum class Target { Smallest, Largest };

// Restarted Lanczos with full reorthogonalization against the Krylov basis
// and the deflation vector. The start vector comes from a fixed seed and all
// reductions run in index order, so the result is reproducible.
RitzPair lanczos(const Operator& apply, Eigen::Index n, const Eigen::VectorXd& deflate, Target target,
                 const SpectrumOptions& opts, double scale_hint) {
  CounterRng rng(0x5eed, 0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(-1.0, 1.0);

  auto project = [&](Eigen::VectorXd& x) {
    if (deflate.size() > 0) x -= deflate.dot(x) * deflate;
  };

  const Eigen::Index max_dim = std::max<Eigen::Index>(
      1, std::min<Eigen::Index>(opts.krylov_dim, n - (deflate.size() > 0 ? 1 : 0)));
  const double floor_tol = 100.0 * std::numeric_limits<double>::epsilon() * std::max(scale_hint, 1e-300);

  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    project(v);
    v.normalize();
    Eigen::MatrixXd basis(n, max_dim);
    std::vector<double> alpha, beta;
    basis.col(0) = v;
    Eigen::VectorXd w(n);
    Eigen::Index m = 0;
    double last_beta = 0.0;
    for (Eigen::Index j = 0; j < max_dim; ++j) {
      apply(basis.col(j), w);
      alpha.push_back(basis.col(j).dot(w));
      for (int pass = 0; pass < 2; ++pass) {
        project(w);
        for (Eigen::Index k = 0; k <= j; ++k) w -= basis.col(k).dot(w) * basis.col(k);
      }
      m = j + 1;
      last_beta = w.norm();
      if (j + 1 == max_dim || last_beta <= floor_tol) break;
      beta.push_back(last_beta);
      basis.col(j + 1) = w / last_beta;
    }

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      t(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::Index pick = target == Target::Smallest ? 0 : m - 1;
    const double theta = es.eigenvalues()(pick);
    const double residual = std::abs(last_beta * es.eigenvectors()(m - 1, pick));
    Eigen::VectorXd ritz = basis.leftCols(m) * es.eigenvectors().col(pick);

    const bool exhausted = last_beta <= floor_tol;
    if (exhausted || residual <= opts.rel_tol * std::abs(theta) || residual <= floor_tol) {
      return {theta, ritz.normalized()};
    }
    v = ritz;
  }
  throw Error(ErrorCode::ConvergenceFailure,
              "Lanczos did not converge in " + std::to_string(opts.max_restarts) + " restarts");
}

double gershgorin_bound(const WeightedGraph& g, LaplacianKind which) {
  if (which == LaplacianKind::Normalized) return 2.0;
  double m = 0.0;
  for (double d : g.degrees()) m = std::max(m, 2.0 * d);
  return m;
}

}  // namespace

Spectrum spectrum(const WeightedGraph& g, LaplacianKind which, const SpectrumOptions& opts) {
  const Index n = g.node_count();
  if (n == 0) throw Error(ErrorCode::InvalidParams, "spectrum of an empty graph");
  Spectrum out;
  if (n == 1) {
    if (which == LaplacianKind::Normalized) throw Error(ErrorCode::IsolatedNode, "node 0");
    out.eigenvalues = {0.0};
    return out;
  }
  const bool dense = opts.method == SpectrumMethod::Dense ||
                     (opts.method == SpectrumMethod::Auto && n <= kDenseSpectrumLimit);
  if (dense) {
    const Eigen::MatrixXd l = which == LaplacianKind::Combinatorial ? laplacian(g) : normalized_laplacian(g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l, Eigen::EigenvaluesOnly);
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    out.lambda2 = out.eigenvalues[1];
    out.lambda_max = out.eigenvalues.back();
    return out;
  }
  // A disconnected graph has a second null vector; deflating the constant
  // vector still lets Lanczos find it (lambda2 = 0).
  const auto apply = make_operator(g, which);
  const Eigen::VectorXd z = null_vector(g, which);
  const double scale = gershgorin_bound(g, which);
  const auto n_e = static_cast<Eigen::Index>(n);
  out.lambda2 = std::max(0.0, lanczos(apply, n_e, z, Target::Smallest, opts, scale).value);
  out.lambda_max = lanczos(apply, n_e, z, Target::Largest, opts, scale).value;
  out.eigenvalues = {0.0, out.lambda2, out.lambda_max};
  return out;
}

double lambda_max_iterative(const WeightedGraph& g, LaplacianKind which, const SpectrumOptions& opts) {
  if (g.node_count() <= 1) return 0.0;
  if (g.edge_count() == 0) return 0.0;
  const auto apply = make_operator(g, which);
  return lanczos(apply, static_cast<Eigen::Index>(g.node_count()), Eigen::VectorXd(), Target::Largest, opts,
                 gershgorin_bound(g, which))
      .value;
}

Eigen::VectorXd fiedler_vector(const WeightedGraph& g, LaplacianKind which) {
  const Index n = g.node_count();
  if (n < 2) throw Error(ErrorCode::InvalidParams, "Fiedler vector needs n >= 2");
  if (n <= kDenseSpectrumLimit) {
    const Eigen::MatrixXd l = which == LaplacianKind::Combinatorial ? laplacian(g) : normalized_laplacian(g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
    return es.eigenvectors().col(1);
  }
  const auto apply = make_operator(g, which);
  return lanczos(apply, static_cast<Eigen::Index>(n), null_vector(g, which), Target::Smallest, {},
                 gershgorin_bound(g, which))
      .vector;
}

double exact_conductance(const WeightedGraph& g) {
  const Index n = g.node_count();
  if (n < 2 || n > 24) throw Error(ErrorCode::InvalidParams, "exact conductance needs 2 <= n <= 24");
  double total_vol = 0.0;
  for (double d : g.degrees()) total_vol += d;
  double best = std::numeric_limits<double>::infinity();
  // Node n-1 is never in S, so each unordered cut is visited once.
  const std::uint32_t limit = 1u << (n - 1);
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    double vol = 0.0;
    for (Index i = 0; i + 1 < n; ++i) {
      if (mask & (1u << i)) vol += g.degree(i);
    }
    double cut = 0.0;
    for (const Edge& e : g.edges()) {
      const bool a = e.u + 1 < n && (mask & (1u << e.u));
      const bool b = e.v + 1 < n && (mask & (1u << e.v));
      if (a != b) cut += e.w;
    }
    const double denom = std::min(vol, total_vol - vol);
    if (denom > 0.0) best = std::min(best, cut / denom);
  }
  return best;
}

CheegerEstimate cheeger_estimate(const WeightedGraph& g) {
  if (!is_connected(g)) throw Error(ErrorCode::Disconnected, "Cheeger constant of a disconnected graph");
  const Index n = g.node_count();
  if (n < 2) throw Error(ErrorCode::InvalidParams, "Cheeger constant needs n >= 2");
  if (n <= 20) {
    const double h = exact_conductance(g);
    return {h, h, true};
  }
  const double lambda2 = spectrum(g, LaplacianKind::Normalized).lambda2;
  Eigen::VectorXd f = fiedler_vector(g, LaplacianKind::Normalized);
  for (Index i = 0; i < n; ++i) f(static_cast<Eigen::Index>(i)) /= std::sqrt(g.degree(i));
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return f(static_cast<Eigen::Index>(a)) < f(static_cast<Eigen::Index>(b));
  });
  double total_vol = 0.0;
  for (double d : g.degrees()) total_vol += d;
  std::vector<char> in_set(n, 0);
  double vol = 0.0;
  double cut = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (Index k = 0; k + 1 < n; ++k) {
    const Index x = order[k];
    in_set[x] = 1;
    vol += g.degree(x);
    for (const Neighbor& nb : g.neighbors(x)) cut += in_set[nb.node] ? -nb.w : nb.w;
    const double denom = std::min(vol, total_vol - vol);
    if (denom > 0.0) best = std::min(best, cut / denom);
  }
  return {std::min(lambda2 / 2.0, best), best, false};
}

}  // namespace onn
