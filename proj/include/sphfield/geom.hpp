#pragma once

#include <cstdint>
#include <vector>

namespace sphfield::geom {

struct CartPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// r in meters, theta in [0, pi], phi in [0, 2 pi).
struct SphPoint {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

inline double dot(const CartPoint& a, const CartPoint& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

double norm(const CartPoint& p);

CartPoint sph_to_cart(const SphPoint& p);

// Inverse of sph_to_cart. The origin maps to (r=0, theta=0, phi=0).
SphPoint cart_to_sph(const CartPoint& p);

// The 32 vertices of a pentakis dodecahedron (12 icosahedron vertices plus
// 20 dodecahedron vertices) scaled to radius a, sorted by z then phi.
std::vector<CartPoint> mic_array_layout(double a);

// Fibonacci-lattice points on the sphere of radius r:
//   z_i = -1 + (2 i + 1) / count,  phi_i = i * pi * (3 - sqrt 5),
//   (x, y) = sqrt(1 - z^2) (cos phi_i, sin phi_i), scaled by r.
std::vector<CartPoint> fibonacci_sphere(int count, double r);

// Points i.i.d. uniform by volume in the shell r_min <= |p| <= r_max.
// Radius from the cube-root inverse CDF, direction from a normalized
// Gaussian triple; both drawn from Xoshiro256ss(seed).
std::vector<CartPoint> random_shell(int count, double r_min, double r_max,
                                    std::uint64_t seed);

// Regular (theta, phi) grid at radius r over cell centers,
// theta_i = (i + 1/2) pi / n_theta, phi_j = (j + 1/2) 2 pi / n_phi,
// row-major theta then phi.
std::vector<SphPoint> sphere_grid(double r, int n_theta, int n_phi);

}  // namespace sphfield::geom
