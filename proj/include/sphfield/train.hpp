#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sphfield/field.hpp"
#include "sphfield/nn.hpp"

namespace sphfield::train {

struct LossWeights {
  double lambda1 = 1.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
};

// lambda1 = 1, lambda2 = 1/k^2, lambda3 = a (the boundary radius).
LossWeights default_weights(double k, double a);

struct AdamConfig {
  double lr = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;
  AdamConfig cfg;

  explicit AdamState(std::size_t n = 0, const AdamConfig& c = {})
      : m(n, 0.0), v(n, 0.0), cfg(c) {}
};

// Standard Adam update with bias correction, in place.
void adam_step(AdamState& state, std::vector<double>& params,
               std::span<const double> gradient);

struct LossReport {
  int epoch = 0;
  double l_data = 0.0;
  double l_pde = 0.0;
  double l_bc = 0.0;
  double weighted_total = 0.0;
};

struct PointsConfig {
  int pde_count = 1000;
  int bc_count = 500;
  double shell_r_max = 0.15;  // collocation shell [a, shell_r_max]
};

struct TrainConfig {
  PointsConfig points;
  nn::MlpArch arch;
  AdamConfig adam;
  int epochs = 10000;
  LossWeights weights;       // used when override_weights
  bool override_weights = false;
  bool use_inverse_k_coefficient = false;
};

struct TrainResult {
  nn::MlpParams params;
  std::vector<LossReport> history;
};

// Full-batch Adam on the three-term loss. Collocation points are drawn once
// from Xoshiro256ss(seed + 1), the boundary set is the Fibonacci lattice on
// r = a, and the network is initialized from `seed`; the loss is recorded
// every epoch before the step.
TrainResult train(const field::ScatteringScene& scene,
                  const field::Measurements& measurements,
                  const TrainConfig& cfg, std::uint64_t seed);

}  // namespace sphfield::train
