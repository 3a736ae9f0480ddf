#pragma once

#include <utility>
#include <vector>

#include "sphfield/field.hpp"
#include "sphfield/geom.hpp"
#include "sphfield/specfun.hpp"

namespace sphfield::sh {

using specfun::Complex;

// Surface-pressure spherical-harmonic coefficients at radius a,
// packed as coeffs[n^2 + n + m].
struct ShCoefficients {
  int order = 0;
  std::vector<Complex> coeffs;
  double k = 0.0;
  double a = 0.0;

  const Complex& at(int n, int m) const { return coeffs[n * n + n + m]; }
  Complex& at(int n, int m) { return coeffs[n * n + n + m]; }
  const Complex& at(specfun::ModeIndex nm) const { return at(nm.n, nm.m); }
};

// Uniform-weight discrete quadrature over Q measurements on the sphere r = a:
//   P_n^m = (4 pi / Q) sum_q P(a, W_q) conj(Y_n^m(W_q)).
// Positions must satisfy ||p| - a| <= 1e-9.
ShCoefficients estimate_coeffs(const field::Measurements& m, int order,
                               double k, double a);

// Field extrapolation by the propagator transfer ratio:
//   P(r, W) = sum_n [G_n(r, a, k) / G_n(a, a, k)] sum_m P_n^m Y_n^m(W),
// which reduces to the truncated surface interpolation at r = a.
Complex reconstruct(const ShCoefficients& c, const geom::SphPoint& p);

// Per-order amplification factors |G_n(r, a, k) / G_n(a, a, k)| for
// diagnosing the ill-posed extrapolation.
std::vector<std::pair<int, double>> conditioning_report(const ShCoefficients& c,
                                                        double r);

}  // namespace sphfield::sh
