#ifndef CPEX_SPECTRAL_HPP_
#define CPEX_SPECTRAL_HPP_

#include <Eigen/Dense>

#include "cpex/design_state.hpp"

namespace cpex {

struct SpectralSummary {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

// Extreme eigenvalues of a symmetric matrix. lambda_max comes from power
// iteration on the Gershgorin-shifted matrix, lambda_min from power
// iteration on (lambda_max I - W).
SpectralSummary extreme_eigenvalues(const Eigen::MatrixXd& W, double tol = 1e-8,
                                    int max_iterations = 100000);

// lambda_max(A) / lambda_min(A) for the accumulated design matrix
double condition_number(const DesignState& state);

}  // namespace cpex

#endif  // CPEX_SPECTRAL_HPP_
