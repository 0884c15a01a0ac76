#include "cpex/environment.hpp"

#include <cmath>
#include <stdexcept>

namespace cpex {

namespace {

// uniform in [0,1) from the top 53 bits; avoids the library-defined
// distributions so streams are reproducible across standard libraries
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

SyntheticEnv::SyntheticEnv(Eigen::VectorXd theta, NoiseModel noise, std::uint64_t seed)
    : theta_(std::move(theta)), noise_(noise), rng_(seed) {
  if (!theta_.allFinite()) throw std::invalid_argument("SyntheticEnv: non-finite theta");
  if (noise_.scale < 0) throw std::invalid_argument("SyntheticEnv: negative noise scale");
}

double SyntheticEnv::sample_noise() {
  if (noise_.kind == NoiseModel::Kind::kUniform)
    return noise_.scale * (2.0 * unit_uniform(rng_) - 1.0);
  if (have_spare_) {
    have_spare_ = false;
    return noise_.scale * spare_;
  }
  // Box-Muller
  double u1 = unit_uniform(rng_);
  while (u1 <= 0.0) u1 = unit_uniform(rng_);
  const double u2 = unit_uniform(rng_);
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * M_PI * u2);
  have_spare_ = true;
  return noise_.scale * r * std::cos(2.0 * M_PI * u2);
}

double SyntheticEnv::pull(const SuperArm& arm) {
  if (arm.ambient() != arm_count())
    throw std::invalid_argument("SyntheticEnv::pull: arm dimension mismatch");
  double r = 0.0;
  for (int e : arm.indices()) r += theta_(e) + sample_noise();
  return r;
}

std::unique_ptr<Environment> SyntheticEnv::clone_with_seed(std::uint64_t seed) const {
  return std::make_unique<SyntheticEnv>(theta_, noise_, seed);
}

Eigen::VectorXd generate_gap_instance(const InstanceSpec& spec) {
  if (spec.delta_min < 0.0 || spec.delta_min > 1.0)
    throw std::invalid_argument("generate_gap_instance: delta_min must lie in [0,1]");
  if (spec.k < 1 || spec.k + 1 > spec.n)
    throw std::invalid_argument("generate_gap_instance: requires k+1 <= n");
  std::mt19937_64 rng(spec.seed ^ 0xa076'1d64'78bd'642full);
  Eigen::VectorXd theta(spec.n);
  double min_top = 2.0;
  for (int i = 0; i < spec.k; ++i) {
    theta(i) = unit_uniform(rng);
    min_top = std::min(min_top, theta(i));
  }
  const double ceiling = min_top - spec.delta_min;
  theta(spec.k) = ceiling;
  for (int i = spec.k + 1; i < spec.n; ++i)
    theta(i) = -1.0 + (ceiling + 1.0) * unit_uniform(rng);
  return theta;
}

std::unique_ptr<SyntheticEnv> generate_synthetic(const InstanceSpec& spec, NoiseModel noise) {
  return std::make_unique<SyntheticEnv>(generate_gap_instance(spec), noise,
                                        spec.seed ^ 0x2545'f491'4f6c'dd1dull);
}

}  // namespace cpex
