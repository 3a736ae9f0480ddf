#include "sphfield/train.hpp"

#include <cmath>
#include <stdexcept>

#include "sphfield/geom.hpp"

namespace sphfield::train {

LossWeights default_weights(double k, double a) {
  if (!(k > 0.0) || !(a > 0.0))
    throw std::domain_error("default_weights: k and a must be > 0");
  return {1.0, 1.0 / (k * k), a};
}

void adam_step(AdamState& state, std::vector<double>& params,
               std::span<const double> gradient) {
  if (state.m.size() != params.size() || gradient.size() != params.size())
    throw std::domain_error("adam_step: shape mismatch");

  ++state.t;
  const AdamConfig& c = state.cfg;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = gradient[i];
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

TrainResult train(const field::ScatteringScene& scene,
                  const field::Measurements& measurements,
                  const TrainConfig& cfg, std::uint64_t seed) {
  if (cfg.epochs < 1) throw std::domain_error("train: epochs must be >= 1");
  if (measurements.positions.empty())
    throw std::domain_error("train: empty measurements");
  if (cfg.points.pde_count < 0 || cfg.points.bc_count < 0)
    throw std::domain_error("train: point counts must be >= 0");
  if (cfg.points.shell_r_max < scene.a)
    throw std::domain_error("train: shell_r_max must be >= a");

  const double k = scene.wavenumber();
  const LossWeights lw =
      cfg.override_weights ? cfg.weights : default_weights(k, scene.a);
  const std::array<double, 3> w{lw.lambda1, lw.lambda2, lw.lambda3};

  const std::vector<geom::CartPoint> pde_points =
      geom::random_shell(cfg.points.pde_count, scene.a, cfg.points.shell_r_max,
                         seed + 1);
  const std::vector<geom::CartPoint> bc_points =
      cfg.points.bc_count > 0
          ? geom::fibonacci_sphere(cfg.points.bc_count, scene.a)
          : std::vector<geom::CartPoint>{};

  nn::DataBatch data{measurements.positions, measurements.pressures};
  nn::LossOptions opt;
  opt.k = k;
  opt.use_inverse_k_coefficient = cfg.use_inverse_k_coefficient;

  TrainResult result;
  result.params = nn::init_params(cfg.arch, seed);
  result.history.reserve(cfg.epochs);

  AdamState adam(result.params.values.size(), cfg.adam);
  std::vector<double> grad;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const nn::LossTerms terms = nn::loss_and_gradient(
        result.params, data, pde_points, bc_points, opt, w, grad);
    const double total =
        w[0] * terms.l_data + w[1] * terms.l_pde + w[2] * terms.l_bc;
    result.history.push_back({epoch, terms.l_data, terms.l_pde, terms.l_bc, total});
    adam_step(adam, result.params.values, grad);
  }
  return result;
}

}  // namespace sphfield::train
