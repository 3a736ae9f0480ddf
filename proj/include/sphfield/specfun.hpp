#pragma once

#include <complex>

namespace sphfield::specfun {

using Complex = std::complex<double>;

// Order/degree pair for spherical-harmonic indexing, |m| <= n.
struct ModeIndex {
  int n = 0;
  int m = 0;
};

// Highest supported order for every function in this module.
inline constexpr int kMaxOrder = 60;

// Spherical Bessel function of the first kind j_n(x), n >= 0, x >= 0.
// Power series for small x, closed forms for n <= 2, upward recurrence for
// x >= n and Miller downward recurrence otherwise.
double sph_bessel_j(int n, double x);

// Spherical Bessel function of the second kind y_n(x), n >= 0, x > 0,
// by upward recurrence from y_0 and y_1.
double sph_bessel_y(int n, double x);

// Spherical Hankel function of the second kind, j_n(x) - i y_n(x).
Complex sph_hankel2(int n, double x);

// Derivatives via f'_n(x) = f_{n-1}(x) - (n+1)/x f_n(x),
// with j_{-1}(x) = cos(x)/x and y_{-1}(x) = sin(x)/x.
double sph_bessel_j_prime(int n, double x);
double sph_bessel_y_prime(int n, double x);
Complex sph_hankel2_prime(int n, double x);

// Legendre polynomial P_n(t), -1 <= t <= 1.
double legendre_p(int n, double t);

// Orthonormal complex spherical harmonic with Condon-Shortley phase.
// Y_n^{-m} = (-1)^m conj(Y_n^m).
Complex sph_harmonic(int n, int m, double theta, double phi);
Complex sph_harmonic(ModeIndex nm, double theta, double phi);

// Radial propagator for a rigid sphere of radius a:
//   G_n(r, a, k) = j_n(kr) - [j_n'(ka) / h_n^(2)'(ka)] h_n^(2)(kr).
// Its radial derivative vanishes at r = a.
Complex radial_propagator(int n, double r, double a, double k);

// d G_n / d r = k [j_n'(kr) - (j_n'(ka) / h_n^(2)'(ka)) h_n^(2)'(kr)].
Complex radial_propagator_prime(int n, double r, double a, double k);

}  // namespace sphfield::specfun
