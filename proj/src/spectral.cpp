#include "cpex/spectral.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace cpex {

namespace {

// Dominant eigenvalue of a symmetric PSD matrix by block-2 orthogonal
// iteration with Rayleigh-Ritz extraction. A 2-block keeps near-degenerate
// extreme pairs (common for circulant-like designs) inside the subspace, so
// convergence is governed by the gap to the third eigenvalue. Reports the
// absolute residual ||P q - mu q|| of the top Ritz pair.
double dominant_eigenvalue(const Eigen::MatrixXd& P, double abs_tol, int max_iterations,
                           int& iterations, double& residual) {
  const int n = static_cast<int>(P.rows());
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);  // fixed start vectors, determinism
  const int b = std::min(2, n);
  Eigen::MatrixXd V(n, b);
  for (int j = 0; j < b; ++j)
    for (int i = 0; i < n; ++i)
      V(i, j) = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5 + (i == j ? 1.0 : 0.0);
  V = Eigen::HouseholderQR<Eigen::MatrixXd>(V).householderQ() *
      Eigen::MatrixXd::Identity(n, b);

  double mu = 0.0;
  for (iterations = 0; iterations < max_iterations; ++iterations) {
    Eigen::MatrixXd W = P * V;
    Eigen::MatrixXd H = V.transpose() * W;  // b x b projection
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(H);
    int top = 0;
    ritz.eigenvalues().maxCoeff(&top);
    mu = ritz.eigenvalues()(top);
    Eigen::VectorXd y = ritz.eigenvectors().col(top);
    residual = (W * y - mu * (V * y)).norm();
    if (residual <= abs_tol) return mu;
    if (W.norm() == 0.0) {  // P = 0 (psd with zero image)
      residual = 0.0;
      return 0.0;
    }
    V = Eigen::HouseholderQR<Eigen::MatrixXd>(W).householderQ() *
        Eigen::MatrixXd::Identity(n, b);
  }
  return mu;
}

}  // namespace

SpectralSummary extreme_eigenvalues(const Eigen::MatrixXd& W, double tol, int max_iterations) {
  if (W.rows() != W.cols()) throw std::invalid_argument("extreme_eigenvalues: matrix not square");
  const double asym = (W - W.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10)
    throw std::invalid_argument("extreme_eigenvalues: matrix asymmetry " + std::to_string(asym) +
                                " exceeds 1e-10");
  const Eigen::MatrixXd S = 0.5 * (W + W.transpose());
  const int n = static_cast<int>(S.rows());

  SpectralSummary out;
  if (n == 1) {
    out.lambda_min = out.lambda_max = S(0, 0);
    return out;
  }

  // Gershgorin bound on the spectral radius; S + shift*I is PSD
  const double shift = S.cwiseAbs().rowwise().sum().maxCoeff();
  const double scale = std::max(shift, 1.0);
  const double abs_tol = tol * scale;

  int it1 = 0, it2 = 0;
  double r1 = 0.0, r2 = 0.0;
  const Eigen::MatrixXd shifted = S + shift * Eigen::MatrixXd::Identity(n, n);
  out.lambda_max = dominant_eigenvalue(shifted, abs_tol, max_iterations, it1, r1) - shift;

  const Eigen::MatrixXd flipped =
      out.lambda_max * Eigen::MatrixXd::Identity(n, n) - S;
  out.lambda_min = out.lambda_max - dominant_eigenvalue(flipped, abs_tol, max_iterations, it2, r2);

  out.iterations = it1 + it2;
  out.residual = std::max(r1, r2);
  if (out.residual > abs_tol)
    throw std::runtime_error("extreme_eigenvalues: no convergence after " +
                             std::to_string(max_iterations) + " iterations, residual " +
                             std::to_string(out.residual));
  if (out.lambda_min > out.lambda_max) std::swap(out.lambda_min, out.lambda_max);
  return out;
}

double condition_number(const DesignState& state) {
  if (!state.invertible())
    throw std::runtime_error("condition_number: design matrix is singular");
  SpectralSummary s = extreme_eigenvalues(state.design());
  if (s.lambda_min <= 0)
    throw std::runtime_error("condition_number: design matrix is singular");
  return s.lambda_max / s.lambda_min;
}

}  // namespace cpex
