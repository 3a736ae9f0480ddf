#include "sphfield/geom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sphfield/rng.hpp"

namespace sphfield::geom {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

double norm(const CartPoint& p) { return std::sqrt(dot(p, p)); }

CartPoint sph_to_cart(const SphPoint& p) {
  const double st = std::sin(p.theta);
  return {p.r * st * std::cos(p.phi), p.r * st * std::sin(p.phi),
          p.r * std::cos(p.theta)};
}

SphPoint cart_to_sph(const CartPoint& p) {
  const double r = norm(p);
  if (r == 0.0) return {0.0, 0.0, 0.0};
  const double theta = std::atan2(std::hypot(p.x, p.y), p.z);
  double phi = std::atan2(p.y, p.x);
  if (phi < 0.0) phi += 2.0 * kPi;
  if (phi >= 2.0 * kPi) phi = 0.0;
  return {r, theta, phi};
}

std::vector<CartPoint> mic_array_layout(double a) {
  if (a <= 0.0) throw std::domain_error("mic_array_layout: a must be > 0");
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;

  std::vector<CartPoint> pts;
  pts.reserve(32);
  // icosahedron: cyclic permutations of (0, +-1, +-g)
  for (double u : {1.0, -1.0}) {
    for (double v : {g, -g}) {
      pts.push_back({0.0, u, v});
      pts.push_back({v, 0.0, u});
      pts.push_back({u, v, 0.0});
    }
  }
  // dodecahedron: (+-1, +-1, +-1) and cyclic permutations of (0, +-g, +-1/g)
  for (double sx : {1.0, -1.0})
    for (double sy : {1.0, -1.0})
      for (double sz : {1.0, -1.0}) pts.push_back({sx, sy, sz});
  for (double u : {g, -g}) {
    for (double v : {1.0 / g, -1.0 / g}) {
      pts.push_back({0.0, u, v});
      pts.push_back({v, 0.0, u});
      pts.push_back({u, v, 0.0});
    }
  }

  for (auto& p : pts) {
    const double s = a / norm(p);
    p = {p.x * s, p.y * s, p.z * s};
  }
  std::sort(pts.begin(), pts.end(), [](const CartPoint& l, const CartPoint& r) {
    if (l.z != r.z) return l.z < r.z;
    return cart_to_sph(l).phi < cart_to_sph(r).phi;
  });
  return pts;
}

std::vector<CartPoint> fibonacci_sphere(int count, double r) {
  if (count < 1) throw std::domain_error("fibonacci_sphere: count must be >= 1");
  if (r <= 0.0) throw std::domain_error("fibonacci_sphere: r must be > 0");
  const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  std::vector<CartPoint> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double z = -1.0 + (2.0 * i + 1.0) / count;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    pts.push_back({r * rho * std::cos(phi), r * rho * std::sin(phi), r * z});
  }
  return pts;
}

std::vector<CartPoint> random_shell(int count, double r_min, double r_max,
                                    std::uint64_t seed) {
  if (count < 0) throw std::domain_error("random_shell: count must be >= 0");
  if (!(0.0 < r_min) || !(r_min <= r_max))
    throw std::domain_error("random_shell: need 0 < r_min <= r_max");

  rng::Xoshiro256ss gen(seed);
  std::vector<CartPoint> pts;
  pts.reserve(count);
  while (static_cast<int>(pts.size()) < count) {
    const double u = gen.uniform01();
    const double r3 = r_min * r_min * r_min +
                      u * (r_max * r_max * r_max - r_min * r_min * r_min);
    const double r = std::cbrt(r3);
    const auto [g0, g1] = gen.normal_pair();
    const auto [g2, g3] = gen.normal_pair();
    (void)g3;
    const double n = std::sqrt(g0 * g0 + g1 * g1 + g2 * g2);
    if (n == 0.0) continue;
    pts.push_back({r * g0 / n, r * g1 / n, r * g2 / n});
  }
  return pts;
}

std::vector<SphPoint> sphere_grid(double r, int n_theta, int n_phi) {
  if (n_theta < 2 || n_phi < 2)
    throw std::domain_error("sphere_grid: n_theta and n_phi must be >= 2");
  std::vector<SphPoint> pts;
  pts.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  for (int i = 0; i < n_theta; ++i) {
    const double theta = (i + 0.5) * kPi / n_theta;
    for (int j = 0; j < n_phi; ++j) {
      const double phi = (j + 0.5) * 2.0 * kPi / n_phi;
      pts.push_back({r, theta, phi});
    }
  }
  return pts;
}

}  // namespace sphfield::geom
