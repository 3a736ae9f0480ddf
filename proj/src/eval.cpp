#include "sphfield/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sphfield/rng.hpp"

namespace sphfield::eval {

namespace {

// Uniform random rotation from a unit quaternion with Gaussian components.
std::array<std::array<double, 3>, 3> random_rotation(rng::Xoshiro256ss& gen) {
  const auto [q0, q1] = gen.normal_pair();
  const auto [q2, q3] = gen.normal_pair();
  const double n = std::sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3);
  const double w = q0 / n, x = q1 / n, y = q2 / n, z = q3 / n;
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
           {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
           {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

geom::CartPoint rotate(const std::array<std::array<double, 3>, 3>& rot,
                       const geom::CartPoint& p) {
  return {rot[0][0] * p.x + rot[0][1] * p.y + rot[0][2] * p.z,
          rot[1][0] * p.x + rot[1][1] * p.y + rot[1][2] * p.z,
          rot[2][0] * p.x + rot[2][1] * p.y + rot[2][2] * p.z};
}

}  // namespace

FieldEstimator make_ground_truth(const field::ScatteringScene& scene,
                                 double scale) {
  if (!(scale > 0.0))
    throw std::domain_error("make_ground_truth: scale must be > 0");
  FieldEstimator e;
  e.kind = FieldEstimator::Kind::kGroundTruth;
  e.name = "truth";
  e.eval = [scene, scale](const geom::CartPoint& p) {
    return field::scene_pressure(scene, p) / scale;
  };
  return e;
}

FieldEstimator make_sh_estimator(const sh::ShCoefficients& coeffs) {
  FieldEstimator e;
  e.kind = FieldEstimator::Kind::kSh;
  e.name = "sh";
  e.eval = [coeffs](const geom::CartPoint& p) {
    return sh::reconstruct(coeffs, geom::cart_to_sph(p));
  };
  return e;
}

FieldEstimator make_pw_estimator(const pw::PwModel& model) {
  FieldEstimator e;
  e.kind = FieldEstimator::Kind::kPl;
  e.name = "pl";
  e.eval = [model](const geom::CartPoint& p) { return pw::reconstruct_pw(model, p); };
  return e;
}

FieldEstimator make_pinn_estimator(const nn::MlpParams& params) {
  FieldEstimator e;
  e.kind = FieldEstimator::Kind::kPinn;
  e.name = "pinn";
  e.eval = [params](const geom::CartPoint& p) {
    const auto y = nn::forward(params, p);
    return Complex(y[0], y[1]);
  };
  return e;
}

std::vector<double> error_map(const FieldEstimator& truth, const FieldEstimator& est,
                              const std::vector<geom::CartPoint>& points) {
  if (points.empty()) throw std::domain_error("error_map: empty point set");
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(std::abs(truth(p) - est(p)));
  return out;
}

double nmse(const FieldEstimator& truth, const FieldEstimator& est,
            const std::vector<geom::CartPoint>& points) {
  if (points.empty()) throw std::domain_error("nmse: empty point set");
  double num = 0.0;
  double den = 0.0;
  for (const auto& p : points) {
    const Complex t = truth(p);
    num += std::norm(t - est(p));
    den += std::norm(t);
  }
  if (den == 0.0) throw std::domain_error("nmse: zero-power reference field");
  if (num == 0.0) return -300.0;
  return std::max(10.0 * std::log10(num / den), -300.0);
}

SweepTable radius_sweep(const FieldEstimator& truth,
                        const std::vector<FieldEstimator>& estimators,
                        const std::vector<double>& radii, int points_per_radius,
                        std::uint64_t seed, double min_radius) {
  if (points_per_radius < 1)
    throw std::domain_error("radius_sweep: points_per_radius must be >= 1");
  for (double r : radii)
    if (r < min_radius - 1e-12)
      throw std::domain_error("radius_sweep: radius below the sphere surface");

  SweepTable table;
  table.radii = radii;
  for (const auto& e : estimators) table.names.push_back(e.name);

  rng::Xoshiro256ss gen(seed);
  for (double r : radii) {
    const auto rot = random_rotation(gen);
    std::vector<geom::CartPoint> pts = geom::fibonacci_sphere(points_per_radius, r);
    for (auto& p : pts) p = rotate(rot, p);

    std::vector<double> row;
    row.reserve(estimators.size());
    for (const auto& e : estimators) row.push_back(nmse(truth, e, pts));
    table.nmse_db.push_back(std::move(row));
  }
  return table;
}

std::vector<SliceRow> field_slice(const FieldEstimator& truth,
                                  const FieldEstimator& est, double r,
                                  int n_theta, int n_phi) {
  const std::vector<geom::SphPoint> grid = geom::sphere_grid(r, n_theta, n_phi);
  std::vector<SliceRow> rows;
  rows.reserve(grid.size());
  for (const auto& s : grid) {
    const geom::CartPoint p = geom::sph_to_cart(s);
    const Complex v = est(p);
    rows.push_back({s.theta, s.phi, v.real(), v.imag(), std::abs(truth(p) - v)});
  }
  return rows;
}

}  // namespace sphfield::eval
