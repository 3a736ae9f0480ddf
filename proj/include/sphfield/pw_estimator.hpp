#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sphfield/field.hpp"
#include "sphfield/geom.hpp"
#include "sphfield/specfun.hpp"

namespace sphfield::pw {

using specfun::Complex;

struct PwModel {
  std::vector<geom::CartPoint> directions;  // unit vectors
  std::vector<Complex> amplitudes;
  double k = 0.0;
  double reg = 0.0;  // relative Tikhonov parameter
};

// Rigid-sphere pressure at each mic due to a unit plane wave per direction:
//   H(q, l) = sum_{n=0}^{N} i^n (2n+1) G_n(a, a, k) P_n(cos T_ql).
// Mics must lie on the sphere r = a; requires N >= ceil(k a) + 2.
Eigen::MatrixXcd steering_matrix(const std::vector<geom::CartPoint>& directions,
                                 const std::vector<geom::CartPoint>& mic_positions,
                                 double k, double a, int order);

// Tikhonov-regularized least squares via SVD:
//   w = argmin |H w - p|^2 + reg^2 s_max^2 |w|^2.
PwModel solve_amplitudes(const field::Measurements& m,
                         const std::vector<geom::CartPoint>& directions,
                         double k, double a, int steering_order, double reg);

// Free-field superposition sum_l w_l exp(i k p . d_l); no scattering term.
Complex reconstruct_pw(const PwModel& model, const geom::CartPoint& p);

}  // namespace sphfield::pw
