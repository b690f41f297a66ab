#pragma once

#include <vector>

#include <Eigen/Dense>

#include "onn/graph.hpp"

namespace onn {

enum class LaplacianKind { Combinatorial, Normalized };

// Ascending eigenvalues. The iterative route only resolves the extremal
// part of the spectrum and reports {0, lambda2, lambda_max}.
struct Spectrum {
  std::vector<double> eigenvalues;
  double lambda2 = 0.0;
  double lambda_max = 0.0;
};

enum class SpectrumMethod { Auto, Dense, Iterative };

struct SpectrumOptions {
  SpectrumMethod method = SpectrumMethod::Auto;
  double rel_tol = 1e-8;
  int krylov_dim = 80;
  int max_restarts = 400;
};

inline constexpr Index kDenseSpectrumLimit = 2048;

// Dense eigendecomposition for n <= 2048, restarted Lanczos otherwise.
// A single node reports lambda2 = lambda_max = 0. Errors: IsolatedNode
// (normalized), ConvergenceFailure (iterative).
Spectrum spectrum(const WeightedGraph& g, LaplacianKind which = LaplacianKind::Combinatorial,
                  const SpectrumOptions& opts = {});

// Largest Laplacian eigenvalue via Lanczos regardless of n.
double lambda_max_iterative(const WeightedGraph& g, LaplacianKind which = LaplacianKind::Combinatorial,
                            const SpectrumOptions& opts = {});

// Unit eigenvector of the second-smallest eigenvalue.
Eigen::VectorXd fiedler_vector(const WeightedGraph& g, LaplacianKind which);

struct CheegerEstimate {
  double h_lower = 0.0;
  double h_upper = 0.0;
  bool exact = false;
};

// Conductance h = min_S w(S, S^c) / min(vol S, vol S^c). Exact by subset
// enumeration for n <= 20; otherwise [lambda2/2, best Fiedler sweep cut]
// with lambda2 of the normalized Laplacian. Errors: Disconnected.
CheegerEstimate cheeger_estimate(const WeightedGraph& g);

// Exhaustive conductance; n <= 24.
double exact_conductance(const WeightedGraph& g);

}  // namespace onn
