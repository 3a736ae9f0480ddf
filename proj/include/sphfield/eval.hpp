#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sphfield/field.hpp"
#include "sphfield/geom.hpp"
#include "sphfield/nn.hpp"
#include "sphfield/pw_estimator.hpp"
#include "sphfield/sh_estimator.hpp"

namespace sphfield::eval {

using specfun::Complex;

// Pressure-at-point handle over the four field sources being compared.
struct FieldEstimator {
  enum class Kind { kGroundTruth, kSh, kPl, kPinn };

  Kind kind = Kind::kGroundTruth;
  std::string name;
  std::function<Complex(const geom::CartPoint&)> eval;

  Complex operator()(const geom::CartPoint& p) const { return eval(p); }
};

// Ground truth in normalized units (scene pressure divided by `scale`).
FieldEstimator make_ground_truth(const field::ScatteringScene& scene, double scale);
FieldEstimator make_sh_estimator(const sh::ShCoefficients& coeffs);
FieldEstimator make_pw_estimator(const pw::PwModel& model);
FieldEstimator make_pinn_estimator(const nn::MlpParams& params);

// Per-point |P - P_est|.
std::vector<double> error_map(const FieldEstimator& truth, const FieldEstimator& est,
                              const std::vector<geom::CartPoint>& points);

// 10 log10(sum |P - P_est|^2 / sum |P|^2), clamped at -300 dB.
double nmse(const FieldEstimator& truth, const FieldEstimator& est,
            const std::vector<geom::CartPoint>& points);

struct SweepTable {
  std::vector<double> radii;
  std::vector<std::string> names;              // estimator column names
  std::vector<std::vector<double>> nmse_db;    // [radius][estimator]
};

// NMSE of each estimator over `points_per_radius` Fibonacci-lattice points
// on the sphere of each radius. The lattice is rotated by a random rotation
// drawn from Xoshiro256ss(seed), one per radius in order.
SweepTable radius_sweep(const FieldEstimator& truth,
                        const std::vector<FieldEstimator>& estimators,
                        const std::vector<double>& radii, int points_per_radius,
                        std::uint64_t seed, double min_radius);

struct SliceRow {
  double theta = 0.0;
  double phi = 0.0;
  double re = 0.0;
  double im = 0.0;
  double err = 0.0;  // |truth - estimate|
};

// Estimator values and error against ground truth on the (theta, phi) grid
// of sphere_grid(r, n_theta, n_phi).
std::vector<SliceRow> field_slice(const FieldEstimator& truth,
                                  const FieldEstimator& est, double r,
                                  int n_theta, int n_phi);

}  // namespace sphfield::eval
