#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sphfield/field.hpp"
#include "sphfield/geom.hpp"
#include "sphfield/pw_estimator.hpp"
#include "sphfield/rng.hpp"
#include "sphfield/specfun.hpp"
#include "test_helpers.hpp"

namespace field = sphfield::field;
namespace geom = sphfield::geom;
namespace pw = sphfield::pw;
namespace sf = sphfield::specfun;
using test_helpers::Complex;

namespace {

std::vector<geom::CartPoint> unit_mic_directions() {
  return geom::mic_array_layout(1.0);
}

field::Measurements measurements_from(const Eigen::VectorXcd& p,
                                      const std::vector<geom::CartPoint>& mics) {
  field::Measurements m;
  m.positions = mics;
  for (Eigen::Index i = 0; i < p.size(); ++i) m.pressures.push_back(p(i));
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("pw_estimator");

TEST_CASE("plane-wave series reproduces the exponential (free field)") {
  // sum_n i^n (2n+1) j_n(kr) P_n(cos T) = e^{i k r cos T}
  const double kr = 0.77 * 3.0;
  for (double ct : {-0.9, -0.3, 0.0, 0.4, 1.0}) {
    Complex acc = 0.0;
    Complex in_pow = 1.0;
    for (int n = 0; n <= 30; ++n) {
      acc += in_pow * (2.0 * n + 1.0) * sf::sph_bessel_j(n, kr) * sf::legendre_p(n, ct);
      in_pow *= Complex(0, 1);
    }
    CHECK(std::abs(acc - std::polar(1.0, kr * ct)) < 1e-8);
  }
}

TEST_CASE("steering entries match a direct series evaluation") {
  const double a = 0.042;
  const double k = 0.77 / a;
  const auto dirs = unit_mic_directions();
  const auto mics = geom::mic_array_layout(a);
  const int order = 12;
  const auto h = pw::steering_matrix(dirs, mics, k, a, order);

  for (int q : {0, 7, 31}) {
    for (int l : {0, 13, 31}) {
      const double ct = std::clamp(
          geom::dot(mics[q], dirs[l]) / geom::norm(mics[q]), -1.0, 1.0);
      Complex expected = 0.0;
      Complex in_pow = 1.0;
      for (int n = 0; n <= order; ++n) {
        expected += in_pow * (2.0 * n + 1.0) * sf::radial_propagator(n, a, a, k) *
                    sf::legendre_p(n, ct);
        in_pow *= Complex(0, 1);
      }
      CHECK(std::abs(h(q, l) - expected) < 1e-13 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("steering columns map onto each other under the antipodal symmetry") {
  const double a = 0.042;
  const double k = 0.77 / a;
  const auto dirs = unit_mic_directions();
  const auto mics = geom::mic_array_layout(a);
  const auto h = pw::steering_matrix(dirs, mics, k, a, 12);

  auto antipode_index = [&](const std::vector<geom::CartPoint>& set,
                            const geom::CartPoint& p) {
    for (std::size_t i = 0; i < set.size(); ++i)
      if (geom::norm({set[i].x + p.x, set[i].y + p.y, set[i].z + p.z}) < 1e-12)
        return static_cast<int>(i);
    FAIL("antipode not found");
    return -1;
  };

  for (int l : {0, 5, 17}) {
    const int l_neg = antipode_index(dirs, dirs[l]);
    for (int q = 0; q < 32; ++q) {
      const int q_neg = antipode_index(mics, mics[q]);
      CHECK(std::abs(h(q, l) - h(q_neg, l_neg)) < 1e-13);
    }
  }
}

TEST_CASE("steering magnitude bound") {
  const double a = 0.042;
  const double k = 0.77 / a;
  const auto dirs = unit_mic_directions();
  const auto mics = geom::mic_array_layout(a);
  const int order = 12;
  const auto h = pw::steering_matrix(dirs, mics, k, a, order);

  double bound = 0.0;
  for (int n = 0; n <= order; ++n)
    bound += (2.0 * n + 1.0) * std::abs(sf::radial_propagator(n, a, a, k));
  CHECK(h.cwiseAbs().maxCoeff() <= bound * (1.0 + 1e-12));
}

TEST_CASE("steering preconditions") {
  const double a = 0.042;
  const double k = 0.77 / a;
  const auto mics = geom::mic_array_layout(a);
  auto bad_dirs = unit_mic_directions();
  bad_dirs[0].x *= 1.5;
  CHECK_THROWS_AS(pw::steering_matrix(bad_dirs, mics, k, a, 12), std::domain_error);

  auto bad_mics = mics;
  bad_mics[3].z += 1e-3;
  CHECK_THROWS_AS(pw::steering_matrix(unit_mic_directions(), bad_mics, k, a, 12),
                  std::domain_error);

  CHECK_THROWS_AS(pw::steering_matrix(unit_mic_directions(), mics, k, a, 1),
                  std::domain_error);
}

TEST_CASE("single-direction synthesis is recovered") {
  const double a = 0.042;
  const double k = 0.77 / a;
  const auto dirs = unit_mic_directions();
  const auto mics = geom::mic_array_layout(a);
  const auto h = pw::steering_matrix(dirs, mics, k, a, 12);

  const int target = 7;
  const auto m = measurements_from(h.col(target), mics);
  const auto model = pw::solve_amplitudes(m, dirs, k, a, 12, 1e-6);

  std::vector<double> mags;
  for (const auto& w : model.amplitudes) mags.push_back(std::abs(w));
  const auto arg_max = std::max_element(mags.begin(), mags.end()) - mags.begin();
  CHECK(arg_max == target);

  std::vector<double> sorted = mags;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  CHECK(mags[target] >= 10.0 * median);
}

TEST_CASE("zero measurements give zero amplitudes, doubling doubles") {
  const double a = 0.042;
  const double k = 0.77 / a;
  const auto dirs = unit_mic_directions();
  const auto mics = geom::mic_array_layout(a);

  field::Measurements zero;
  zero.positions = mics;
  zero.pressures.assign(32, Complex(0, 0));
  const auto wz = pw::solve_amplitudes(zero, dirs, k, a, 12, 1e-3);
  for (const auto& w : wz.amplitudes) CHECK(std::abs(w) == 0.0);

  field::Measurements m;
  m.positions = mics;
  sphfield::rng::Xoshiro256ss gen(4);
  for (int i = 0; i < 32; ++i) {
    const auto [g0, g1] = gen.normal_pair();
    m.pressures.push_back(Complex(g0, g1));
  }
  field::Measurements doubled = m;
  for (auto& p : doubled.pressures) p *= 2.0;

  const auto w1 = pw::solve_amplitudes(m, dirs, k, a, 12, 1e-3);
  const auto w2 = pw::solve_amplitudes(doubled, dirs, k, a, 12, 1e-3);
  for (std::size_t i = 0; i < w1.amplitudes.size(); ++i)
    CHECK(std::abs(w2.amplitudes[i] - 2.0 * w1.amplitudes[i]) <
          1e-12 * std::max(1.0, std::abs(w1.amplitudes[i])));
}

TEST_CASE("reconstruction basics") {
  pw::PwModel model;
  model.k = 18.3;
  model.directions = {{1, 0, 0}, {0, 0, 1}};
  model.amplitudes = {Complex(0.3, -0.2), Complex(-1.1, 0.4)};

  const Complex at_origin = pw::reconstruct_pw(model, {0, 0, 0});
  CHECK(std::abs(at_origin - (model.amplitudes[0] + model.amplitudes[1])) < 1e-15);

  pw::PwModel single;
  single.k = 18.3;
  single.directions = {{0, 1, 0}};
  single.amplitudes = {Complex(1.0, 0.0)};
  const double wavelength = 2.0 * test_helpers::kPi / single.k;
  const Complex start = pw::reconstruct_pw(single, {0, 0, 0});
  const Complex after = pw::reconstruct_pw(single, {0, wavelength, 0});
  CHECK(std::abs(after - start) < 1e-12);
}

TEST_CASE("reconstruction satisfies the Helmholtz equation") {
  pw::PwModel model;
  model.k = 18.3;
  model.directions = unit_mic_directions();
  sphfield::rng::Xoshiro256ss gen(9);
  for (std::size_t i = 0; i < model.directions.size(); ++i) {
    const auto [g0, g1] = gen.normal_pair();
    model.amplitudes.push_back(Complex(g0, g1));
  }

  const auto pts = geom::random_shell(10, 0.05, 0.12, 31);
  double max_p = 0.0;
  for (const auto& p : pts) max_p = std::max(max_p, std::abs(pw::reconstruct_pw(model, p)));

  const double h = 1e-4;
  const double k2 = model.k * model.k;
  for (const auto& p : pts) {
    const Complex center = pw::reconstruct_pw(model, p);
    Complex lap = -6.0 * center;
    lap += pw::reconstruct_pw(model, {p.x + h, p.y, p.z});
    lap += pw::reconstruct_pw(model, {p.x - h, p.y, p.z});
    lap += pw::reconstruct_pw(model, {p.x, p.y + h, p.z});
    lap += pw::reconstruct_pw(model, {p.x, p.y - h, p.z});
    lap += pw::reconstruct_pw(model, {p.x, p.y, p.z + h});
    lap += pw::reconstruct_pw(model, {p.x, p.y, p.z - h});
    lap /= h * h;
    CHECK(std::abs(lap + k2 * center) < 1e-3 * k2 * max_p);
  }
}

TEST_CASE("fit residual is non-increasing as reg decreases") {
  const double a = 0.042;
  const double k = 0.77 / a;
  const auto dirs = unit_mic_directions();
  const auto mics = geom::mic_array_layout(a);
  const auto h = pw::steering_matrix(dirs, mics, k, a, 12);

  field::Measurements m;
  m.positions = mics;
  sphfield::rng::Xoshiro256ss gen(13);
  Eigen::VectorXcd p(32);
  for (int i = 0; i < 32; ++i) {
    const auto [g0, g1] = gen.normal_pair();
    p(i) = Complex(g0, g1);
    m.pressures.push_back(p(i));
  }

  double prev = 1e300;
  for (double reg : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
    const auto model = pw::solve_amplitudes(m, dirs, k, a, 12, reg);
    Eigen::VectorXcd w(32);
    for (int i = 0; i < 32; ++i) w(i) = model.amplitudes[i];
    const double residual = (h * w - p).norm();
    CHECK(residual <= prev + 1e-12);
    prev = residual;
  }
}

TEST_CASE("solve is deterministic and permutation-equivariant") {
  const double a = 0.042;
  const double k = 0.77 / a;
  const auto dirs = unit_mic_directions();
  const auto mics = geom::mic_array_layout(a);

  field::Measurements m;
  m.positions = mics;
  sphfield::rng::Xoshiro256ss gen(21);
  for (int i = 0; i < 32; ++i) {
    const auto [g0, g1] = gen.normal_pair();
    m.pressures.push_back(Complex(g0, g1));
  }

  const auto w1 = pw::solve_amplitudes(m, dirs, k, a, 12, 1e-3);
  const auto w2 = pw::solve_amplitudes(m, dirs, k, a, 12, 1e-3);
  for (std::size_t i = 0; i < w1.amplitudes.size(); ++i)
    CHECK(w1.amplitudes[i] == w2.amplitudes[i]);

  std::vector<geom::CartPoint> permuted = dirs;
  std::rotate(permuted.begin(), permuted.begin() + 5, permuted.end());
  const auto wp = pw::solve_amplitudes(m, permuted, k, a, 12, 1e-3);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const std::size_t j = (i + 5) % dirs.size();
    CHECK(std::abs(wp.amplitudes[i] - w1.amplitudes[j]) < 1e-10);
  }
}

TEST_SUITE_END();
