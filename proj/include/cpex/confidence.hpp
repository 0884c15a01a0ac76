#ifndef CPEX_CONFIDENCE_HPP_
#define CPEX_CONFIDENCE_HPP_

namespace cpex {

// Anytime confidence-radius parameters. The noise bound surrogate R enters
// through sigma = k R; Gaussian noise uses its standard deviation as R,
// which is a heuristic stand-in for the bounded-noise assumption.
struct ConfidenceParams {
  double noise_bound = 1.0;  // R
  int k = 2;
  double delta = 0.05;
  double epsilon = 0.0;

  double sigma() const { return k * noise_bound; }
};

inline constexpr double kLogUnionConstant = -0.49770405251556985;  // ln(6/pi^2)

// C_t = 2 sqrt(2) sigma sqrt(log(c' t^2 K / delta)) with c' = 6/pi^2,
// taking log K directly so K = C(n,k) never overflows.
double conf_radius_ellipsoid(const ConfidenceParams& params, long t, double log_cardinality);

// diagonal-approximation radius: C_t = sigma sqrt(2 log(c' t^2 n / delta))
double conf_radius_independent(const ConfidenceParams& params, long t, int n);

}  // namespace cpex

#endif  // CPEX_CONFIDENCE_HPP_
