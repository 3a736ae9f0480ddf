#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sphfield/geom.hpp"
#include "sphfield/specfun.hpp"

namespace sphfield::nn {

using specfun::Complex;

// Fully connected tanh network, linear output. The two output channels are
// the real and imaginary parts of the estimated pressure.
struct MlpArch {
  int input_dim = 3;
  int hidden_layers = 3;
  int hidden_width = 4;
  int output_dim = 2;

  int layer_count() const { return hidden_layers + 1; }
  int layer_in(int layer) const;
  int layer_out(int layer) const;
  int weight_offset(int layer) const;
  int bias_offset(int layer) const;
  int param_count() const;
  bool operator==(const MlpArch&) const = default;
};

// Flat parameter vector; per layer the out x in weight matrix (row-major)
// followed by the bias vector.
struct MlpParams {
  MlpArch arch;
  std::vector<double> values;
};

struct InputDerivatives {
  std::array<double, 2> value{};
  std::array<std::array<double, 3>, 2> gradient{};  // [channel][x y z]
  std::array<double, 2> laplacian{};
};

struct DataBatch {
  std::span<const geom::CartPoint> positions;
  std::span<const Complex> pressures;
};

struct LossTerms {
  double l_data = 0.0;
  double l_pde = 0.0;
  double l_bc = 0.0;
};

struct LossOptions {
  double k = 0.0;  // wavenumber, 1/m
  // Helmholtz residual coefficient: k^2 by default, or (1/k)^2 when
  // replaying the alternate scaling.
  bool use_inverse_k_coefficient = false;

  double helmholtz_coefficient() const {
    return use_inverse_k_coefficient ? 1.0 / (k * k) : k * k;
  }
};

// Glorot-uniform weights, s = sqrt(6 / (fan_in + fan_out)); zero biases.
// Draws come from Xoshiro256ss(seed) in layer order.
MlpParams init_params(const MlpArch& arch, std::uint64_t seed);

std::array<double, 2> forward(const MlpParams& params, const geom::CartPoint& x);

// Exact first and second input derivatives by layerwise propagation of the
// value, Jacobian, and full 3x3 input Hessian per unit.
InputDerivatives input_derivatives(const MlpParams& params,
                                   const geom::CartPoint& x);

//   l_data = (1/Q) sum_q |P(x_q) - F(x_q)|^2
//   l_pde  = (1/D) sum_d sum_j (lap F_j(x_d) + kappa F_j(x_d))^2
//   l_bc   = (1/B) sum_b sum_j (x_b . grad F_j(x_b))^2
// Accumulation over points uses pairwise summation.
LossTerms loss_terms(const MlpParams& params, const DataBatch& data,
                     std::span<const geom::CartPoint> pde_points,
                     std::span<const geom::CartPoint> bc_points,
                     const LossOptions& opt);

// Exact gradient of w0 l_data + w1 l_pde + w2 l_bc with respect to every
// parameter, differentiating through the input-derivative computation.
std::vector<double> param_gradient(const MlpParams& params, const DataBatch& data,
                                   std::span<const geom::CartPoint> pde_points,
                                   std::span<const geom::CartPoint> bc_points,
                                   const LossOptions& opt,
                                   const std::array<double, 3>& weights);

// Single pass computing both; the gradient lands in grad_out.
LossTerms loss_and_gradient(const MlpParams& params, const DataBatch& data,
                            std::span<const geom::CartPoint> pde_points,
                            std::span<const geom::CartPoint> bc_points,
                            const LossOptions& opt,
                            const std::array<double, 3>& weights,
                            std::vector<double>& grad_out);

// Text checkpoint: architecture header plus one %.17g value per line.
void save_checkpoint(const MlpParams& params, std::ostream& out);
MlpParams load_checkpoint(std::istream& in);

}  // namespace sphfield::nn
