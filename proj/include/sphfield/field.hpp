#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sphfield/geom.hpp"
#include "sphfield/specfun.hpp"

namespace sphfield::field {

using specfun::Complex;

struct PointSource {
  geom::CartPoint position;  // strictly outside the sphere
  Complex amplitude{1.0, 0.0};
};

struct ScatteringScene {
  double a = 0.042;   // sphere radius, m
  double c = 343.0;   // sound speed, m/s
  double f = 1000.0;  // frequency, Hz
  std::vector<PointSource> sources;

  double wavenumber() const;
};

struct Measurements {
  std::vector<geom::CartPoint> positions;
  std::vector<Complex> pressures;
  double scale = 1.0;  // cumulative normalization factor, physical = scale * stored
  std::optional<double> snr_db;
};

// Complex pressure at `obs` due to scene source `source_index`, from the
// scattered Green's-function series
//   P = amp (-i k / 4 pi) sum_n (2n+1) G_n(r, a, k) h_n^(2)(k r_s) P_n(cos T),
// truncated once three consecutive terms fall below 1e-12 of the running sum
// (order cap 60). Requires |obs| >= a and r_s > |obs|.
Complex point_source_pressure(const ScatteringScene& scene, int source_index,
                              const geom::CartPoint& obs);

// Same series with the scattered part of G_n zeroed, i.e. the incident
// component only.
Complex point_source_pressure_incident(const ScatteringScene& scene,
                                       int source_index,
                                       const geom::CartPoint& obs);

// Superposition over all scene sources; zero for an empty source list.
Complex scene_pressure(const ScatteringScene& scene, const geom::CartPoint& obs);

// Adds circularly-symmetric complex Gaussian noise with per-set power
// mean(|P|^2) 10^(-snr_db / 10). No-op when snr_db is empty.
Measurements add_noise(const Measurements& m, std::optional<double> snr_db,
                       std::uint64_t seed);

// Divides all pressures by s = max_q max(|Re P_q|, |Im P_q|) and multiplies
// `scale` by s, so repeated application is a fixed point.
Measurements normalize(const Measurements& m);

}  // namespace sphfield::field
