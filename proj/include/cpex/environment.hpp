#ifndef CPEX_ENVIRONMENT_HPP_
#define CPEX_ENVIRONMENT_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <random>

#include "cpex/super_arm.hpp"

namespace cpex {

// A reward-generating process observed only through full-bandit pulls:
// one noisy sum of the pulled super-arm's rewards per call.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual int arm_count() const = 0;
  virtual double pull(const SuperArm& arm) = 0;
  // true expected single-arm rewards, for judging outputs
  virtual const Eigen::VectorXd& mean_rewards() const = 0;
  virtual std::unique_ptr<Environment> clone_with_seed(std::uint64_t seed) const = 0;
};

struct NoiseModel {
  enum class Kind { kGaussian, kUniform };
  Kind kind = Kind::kGaussian;
  double scale = 1.0;  // sigma for Gaussian, half-range R for uniform

  static NoiseModel gaussian(double sigma) { return {Kind::kGaussian, sigma}; }
  static NoiseModel uniform(double r) { return {Kind::kUniform, r}; }
};

// theta plus fresh independent per-arm noise, summed over the pulled set
class SyntheticEnv final : public Environment {
 public:
  SyntheticEnv(Eigen::VectorXd theta, NoiseModel noise, std::uint64_t seed);

  int arm_count() const override { return static_cast<int>(theta_.size()); }
  double pull(const SuperArm& arm) override;
  const Eigen::VectorXd& mean_rewards() const override { return theta_; }
  std::unique_ptr<Environment> clone_with_seed(std::uint64_t seed) const override;

  const NoiseModel& noise() const { return noise_; }

 private:
  double sample_noise();

  Eigen::VectorXd theta_;
  NoiseModel noise_;
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct InstanceSpec {
  int n = 0;
  int k = 0;
  double delta_min = 0.0;
  std::uint64_t seed = 0;
};

// Gap-controlled instance: top-k means uniform in [0,1], the (k+1)-th mean
// sits exactly delta_min below their minimum, the rest fall in
// [-1, theta_min_k - delta_min]. The minimum super-arm gap equals delta_min
// by construction.
Eigen::VectorXd generate_gap_instance(const InstanceSpec& spec);

std::unique_ptr<SyntheticEnv> generate_synthetic(const InstanceSpec& spec,
                                                 NoiseModel noise = NoiseModel::gaussian(1.0));

}  // namespace cpex

#endif  // CPEX_ENVIRONMENT_HPP_
