#include "sphfield/specfun.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace sphfield::specfun {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_order(int n, const char* who) {
  if (n < 0) throw std::domain_error(std::string(who) + ": order must be >= 0");
  if (n > kMaxOrder)
    throw std::domain_error(std::string(who) + ": order exceeds " +
                            std::to_string(kMaxOrder));
}

// j_n(x) = x^n / (2n+1)!! sum_k (-x^2/2)^k / (k! (2n+2k+1)!!),
// no cancellation for x <= 1.5.
double bessel_j_series(int n, double x) {
  double lead = 1.0;
  for (int i = 1; i <= n; ++i) lead *= x / (2.0 * i + 1.0);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 40; ++k) {
    term *= -(x * x / 2.0) / (k * (2.0 * n + 2.0 * k + 1.0));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return lead * sum;
}

double bessel_j0(double x) { return std::sin(x) / x; }
double bessel_j1(double x) { return std::sin(x) / (x * x) - std::cos(x) / x; }
double bessel_j2(double x) {
  return (3.0 / (x * x * x) - 1.0 / x) * std::sin(x) -
         3.0 * std::cos(x) / (x * x);
}

double bessel_j_upward(int n, double x) {
  double jm = bessel_j0(x);
  double jc = bessel_j1(x);
  for (int m = 1; m < n; ++m) {
    const double jn = (2.0 * m + 1.0) / x * jc - jm;
    jm = jc;
    jc = jn;
  }
  return jc;
}

// Miller downward recurrence, normalized against j_0.
double bessel_j_downward(int n, double x) {
  const int start = n + 1 + static_cast<int>(std::ceil(std::sqrt(40.0 * n)));
  double fp = 0.0;
  double fc = 1e-30;
  double target = 0.0;
  for (int m = start; m >= 1; --m) {
    const double fm = (2.0 * m + 1.0) / x * fc - fp;
    fp = fc;
    fc = fm;
    if (m - 1 == n) target = fc;
    if (std::abs(fc) > 1e250) {
      fp *= 1e-250;
      fc *= 1e-250;
      target *= 1e-250;
    }
  }
  return target * (bessel_j0(x) / fc);
}

}  // namespace

double sph_bessel_j(int n, double x) {
  check_order(n, "sph_bessel_j");
  if (x < 0.0) throw std::domain_error("sph_bessel_j: x must be >= 0");
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (x <= 1.5) return bessel_j_series(n, x);
  if (n == 0) return bessel_j0(x);
  if (n == 1) return bessel_j1(x);
  if (n == 2) return bessel_j2(x);
  if (x >= n) return bessel_j_upward(n, x);
  return bessel_j_downward(n, x);
}

double sph_bessel_y(int n, double x) {
  check_order(n, "sph_bessel_y");
  if (x <= 0.0) throw std::domain_error("sph_bessel_y: x must be > 0");
  double ym = -std::cos(x) / x;
  if (n == 0) return ym;
  double yc = -std::cos(x) / (x * x) - std::sin(x) / x;
  for (int m = 1; m < n; ++m) {
    const double yn = (2.0 * m + 1.0) / x * yc - ym;
    ym = yc;
    yc = yn;
  }
  if (!std::isfinite(yc))
    throw std::range_error("sph_bessel_y: overflow at n=" + std::to_string(n));
  return yc;
}

Complex sph_hankel2(int n, double x) {
  return {sph_bessel_j(n, x), -sph_bessel_y(n, x)};
}

double sph_bessel_j_prime(int n, double x) {
  check_order(n, "sph_bessel_j_prime");
  if (x <= 0.0) throw std::domain_error("sph_bessel_j_prime: x must be > 0");
  const double prev = n == 0 ? std::cos(x) / x : sph_bessel_j(n - 1, x);
  return prev - (n + 1.0) / x * sph_bessel_j(n, x);
}

double sph_bessel_y_prime(int n, double x) {
  check_order(n, "sph_bessel_y_prime");
  if (x <= 0.0) throw std::domain_error("sph_bessel_y_prime: x must be > 0");
  const double prev = n == 0 ? std::sin(x) / x : sph_bessel_y(n - 1, x);
  return prev - (n + 1.0) / x * sph_bessel_y(n, x);
}

Complex sph_hankel2_prime(int n, double x) {
  return {sph_bessel_j_prime(n, x), -sph_bessel_y_prime(n, x)};
}

double legendre_p(int n, double t) {
  check_order(n, "legendre_p");
  if (std::abs(t) > 1.0) throw std::domain_error("legendre_p: |t| must be <= 1");
  if (n == 0) return 1.0;
  double pm = 1.0;
  double pc = t;
  for (int m = 1; m < n; ++m) {
    const double pn = ((2.0 * m + 1.0) * t * pc - m * pm) / (m + 1.0);
    pm = pc;
    pc = pn;
  }
  return pc;
}

Complex sph_harmonic(int n, int m, double theta, double phi) {
  check_order(n, "sph_harmonic");
  const int am = std::abs(m);
  if (am > n) throw std::domain_error("sph_harmonic: |m| must be <= n");

  const double ct = std::cos(theta);
  const double st = std::sin(theta);

  // Normalized associated Legendre with Condon-Shortley phase:
  // Pb_0^0 = 1/sqrt(4 pi), Pb_m^m = -sqrt((2m+1)/(2m)) st Pb_{m-1}^{m-1},
  // Pb_{m+1}^m = sqrt(2m+3) ct Pb_m^m,
  // Pb_n^m = a (ct Pb_{n-1}^m - b Pb_{n-2}^m),
  //   a = sqrt((4n^2-1)/(n^2-m^2)), b = sqrt(((n-1)^2-m^2)/(4(n-1)^2-1)).
  double pmm = 1.0 / std::sqrt(4.0 * kPi);
  for (int i = 1; i <= am; ++i)
    pmm *= -std::sqrt((2.0 * i + 1.0) / (2.0 * i)) * st;

  double p = pmm;
  if (n > am) {
    double prev = pmm;
    p = std::sqrt(2.0 * am + 3.0) * ct * pmm;
    for (int l = am + 2; l <= n; ++l) {
      const double a =
          std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - am * am));
      const double b = std::sqrt(
          ((l - 1.0) * (l - 1.0) - am * am) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      const double next = a * (ct * p - b * prev);
      prev = p;
      p = next;
    }
  }

  const Complex e = std::polar(1.0, am * phi);
  if (m >= 0) return p * e;
  const double sign = (am % 2 == 0) ? 1.0 : -1.0;
  return sign * p * std::conj(e);
}

namespace {

// Points constructed on the surface can land a few ulp inside; snap those
// back to r = a and reject anything genuinely interior.
double clamp_to_surface(double r, double a, const char* who) {
  if (r >= a) return r;
  if (r > a * (1.0 - 1e-12)) return a;
  throw std::domain_error(std::string(who) + ": r must be >= a");
}

}  // namespace

Complex sph_harmonic(ModeIndex nm, double theta, double phi) {
  return sph_harmonic(nm.n, nm.m, theta, phi);
}

Complex radial_propagator(int n, double r, double a, double k) {
  check_order(n, "radial_propagator");
  if (!(a > 0.0) || !(k > 0.0))
    throw std::domain_error("radial_propagator: a and k must be > 0");
  r = clamp_to_surface(r, a, "radial_propagator");
  const Complex ratio = sph_bessel_j_prime(n, k * a) / sph_hankel2_prime(n, k * a);
  return sph_bessel_j(n, k * r) - ratio * sph_hankel2(n, k * r);
}

Complex radial_propagator_prime(int n, double r, double a, double k) {
  check_order(n, "radial_propagator_prime");
  if (!(a > 0.0) || !(k > 0.0))
    throw std::domain_error("radial_propagator_prime: a and k must be > 0");
  r = clamp_to_surface(r, a, "radial_propagator_prime");
  const Complex ratio = sph_bessel_j_prime(n, k * a) / sph_hankel2_prime(n, k * a);
  return k * (sph_bessel_j_prime(n, k * r) - ratio * sph_hankel2_prime(n, k * r));
}

}  // namespace sphfield::specfun
