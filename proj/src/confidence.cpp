#include "cpex/confidence.hpp"

#include <cmath>
#include <stdexcept>

namespace cpex {

namespace {

double log_argument(const ConfidenceParams& params, long t, double log_card) {
  if (t < 1) throw std::invalid_argument("confidence radius: t must be >= 1");
  if (params.delta <= 0.0 || params.delta >= 1.0)
    throw std::invalid_argument("confidence radius: delta must lie in (0,1)");
  double v = kLogUnionConstant + 2.0 * std::log(static_cast<double>(t)) + log_card -
             std::log(params.delta);
  if (v < 0.0)
    throw std::invalid_argument("confidence radius: degenerate parameters, log argument < 1");
  return v;
}

}  // namespace

double conf_radius_ellipsoid(const ConfidenceParams& params, long t, double log_cardinality) {
  const double c = 2.0 * std::sqrt(2.0) * params.sigma();
  return c * std::sqrt(log_argument(params, t, log_cardinality));
}

double conf_radius_independent(const ConfidenceParams& params, long t, int n) {
  return params.sigma() *
         std::sqrt(2.0 * log_argument(params, t, std::log(static_cast<double>(n))));
}

}  // namespace cpex
