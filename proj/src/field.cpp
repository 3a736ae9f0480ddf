#include "sphfield/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sphfield/rng.hpp"

namespace sphfield::field {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Scattered-series sum with incremental Legendre recurrence. Stops once
// three consecutive terms drop below 1e-12 of the running sum.
Complex series_pressure(const ScatteringScene& scene, int source_index,
                        const geom::CartPoint& obs, bool with_scattering) {
  if (source_index < 0 ||
      source_index >= static_cast<int>(scene.sources.size()))
    throw std::domain_error("point_source_pressure: source index out of range");
  const PointSource& src = scene.sources[source_index];

  const double r = geom::norm(obs);
  const double rs = geom::norm(src.position);
  const double k = scene.wavenumber();
  if (r < scene.a - 1e-12)
    throw std::domain_error("point_source_pressure: observation inside sphere");
  if (!(rs > r))
    throw std::domain_error(
        "point_source_pressure: source must lie outside the observation radius");

  const double cos_gamma =
      std::clamp(geom::dot(obs, src.position) / (r * rs), -1.0, 1.0);

  Complex sum = 0.0;
  double p_prev = 1.0;       // P_0
  double p_curr = cos_gamma; // P_1
  int small_terms = 0;
  for (int n = 0; n <= specfun::kMaxOrder; ++n) {
    const double pn = n == 0 ? 1.0 : (n == 1 ? cos_gamma : p_curr);
    Complex radial = specfun::sph_bessel_j(n, k * r);
    if (with_scattering) radial = specfun::radial_propagator(n, r, scene.a, k);
    const Complex term =
        (2.0 * n + 1.0) * radial * specfun::sph_hankel2(n, k * rs) * pn;
    sum += term;

    if (std::abs(term) < 1e-12 * std::max(std::abs(sum), 1e-300)) {
      if (++small_terms >= 3) break;
    } else {
      small_terms = 0;
    }
    if (n >= 1) {
      const double p_next =
          ((2.0 * n + 1.0) * cos_gamma * p_curr - n * p_prev) / (n + 1.0);
      p_prev = p_curr;
      p_curr = p_next;
    }
  }
  return src.amplitude * Complex(0.0, -k / (4.0 * kPi)) * sum;
}

}  // namespace

double ScatteringScene::wavenumber() const {
  if (!(a > 0.0) || !(c > 0.0) || !(f > 0.0))
    throw std::domain_error("ScatteringScene: a, c, f must be > 0");
  return 2.0 * kPi * f / c;
}

Complex point_source_pressure(const ScatteringScene& scene, int source_index,
                              const geom::CartPoint& obs) {
  return series_pressure(scene, source_index, obs, true);
}

Complex point_source_pressure_incident(const ScatteringScene& scene,
                                       int source_index,
                                       const geom::CartPoint& obs) {
  return series_pressure(scene, source_index, obs, false);
}

Complex scene_pressure(const ScatteringScene& scene, const geom::CartPoint& obs) {
  Complex sum = 0.0;
  for (int i = 0; i < static_cast<int>(scene.sources.size()); ++i)
    sum += point_source_pressure(scene, i, obs);
  return sum;
}

Measurements add_noise(const Measurements& m, std::optional<double> snr_db,
                       std::uint64_t seed) {
  if (m.pressures.empty())
    throw std::domain_error("add_noise: empty measurements");
  if (!snr_db) return m;

  double mean_power = 0.0;
  for (const Complex& p : m.pressures) mean_power += std::norm(p);
  mean_power /= static_cast<double>(m.pressures.size());

  const double noise_power = mean_power * std::pow(10.0, -*snr_db / 10.0);
  const double sigma = std::sqrt(noise_power / 2.0);

  Measurements out = m;
  out.snr_db = snr_db;
  rng::Xoshiro256ss gen(seed);
  for (Complex& p : out.pressures) {
    const auto [n0, n1] = gen.normal_pair();
    p += Complex(sigma * n0, sigma * n1);
  }
  return out;
}

Measurements normalize(const Measurements& m) {
  if (m.pressures.empty()) throw std::domain_error("normalize: empty measurements");
  double s = 0.0;
  for (const Complex& p : m.pressures)
    s = std::max({s, std::abs(p.real()), std::abs(p.imag())});
  if (s == 0.0) throw std::domain_error("normalize: all-zero measurements");

  Measurements out = m;
  for (Complex& p : out.pressures) p /= s;
  out.scale = m.scale * s;
  return out;
}

}  // namespace sphfield::field
