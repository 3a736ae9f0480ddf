#include "sphfield/sh_estimator.hpp"

#include <cmath>
#include <stdexcept>

namespace sphfield::sh {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

ShCoefficients estimate_coeffs(const field::Measurements& m, int order,
                               double k, double a) {
  if (order < 0) throw std::domain_error("estimate_coeffs: order must be >= 0");
  if (order > specfun::kMaxOrder)
    throw std::domain_error("estimate_coeffs: order exceeds maximum");
  if (m.positions.size() != m.pressures.size() || m.positions.empty())
    throw std::domain_error("estimate_coeffs: positions/pressures mismatch");
  if (!(a > 0.0) || !(k > 0.0))
    throw std::domain_error("estimate_coeffs: a and k must be > 0");

  const std::size_t q_count = m.positions.size();
  std::vector<geom::SphPoint> angles;
  angles.reserve(q_count);
  for (const auto& p : m.positions) {
    if (std::abs(geom::norm(p) - a) > 1e-9)
      throw std::domain_error("estimate_coeffs: measurement position off the sphere");
    angles.push_back(geom::cart_to_sph(p));
  }

  ShCoefficients out;
  out.order = order;
  out.k = k;
  out.a = a;
  out.coeffs.assign(static_cast<std::size_t>(order + 1) * (order + 1), 0.0);
  const double w = 4.0 * kPi / static_cast<double>(q_count);
  for (int n = 0; n <= order; ++n) {
    for (int mm = -n; mm <= n; ++mm) {
      const specfun::ModeIndex nm{n, mm};
      Complex acc = 0.0;
      for (std::size_t q = 0; q < q_count; ++q) {
        acc += m.pressures[q] *
               std::conj(specfun::sph_harmonic(nm, angles[q].theta,
                                               angles[q].phi));
      }
      out.at(n, mm) = w * acc;
    }
  }
  return out;
}

Complex reconstruct(const ShCoefficients& c, const geom::SphPoint& p) {
  if (p.r < c.a - 1e-12)
    throw std::domain_error("reconstruct: r must be >= a");
  Complex out = 0.0;
  for (int n = 0; n <= c.order; ++n) {
    const Complex ratio = specfun::radial_propagator(n, p.r, c.a, c.k) /
                          specfun::radial_propagator(n, c.a, c.a, c.k);
    Complex mode_sum = 0.0;
    for (int m = -n; m <= n; ++m)
      mode_sum += c.at(n, m) * specfun::sph_harmonic(n, m, p.theta, p.phi);
    out += ratio * mode_sum;
  }
  return out;
}

std::vector<std::pair<int, double>> conditioning_report(const ShCoefficients& c,
                                                        double r) {
  if (r < c.a - 1e-12)
    throw std::domain_error("conditioning_report: r must be >= a");
  std::vector<std::pair<int, double>> out;
  out.reserve(c.order + 1);
  for (int n = 0; n <= c.order; ++n) {
    const double factor = std::abs(specfun::radial_propagator(n, r, c.a, c.k) /
                                   specfun::radial_propagator(n, c.a, c.a, c.k));
    out.emplace_back(n, factor);
  }
  return out;
}

}  // namespace sphfield::sh
