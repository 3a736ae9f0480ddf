#include "sphfield/pw_estimator.hpp"

#include <cmath>
#include <stdexcept>

namespace sphfield::pw {

namespace {

// P_0..P_order at t by the three-term recurrence, written into `out`.
void legendre_all(int order, double t, std::vector<double>& out) {
  out.resize(order + 1);
  out[0] = 1.0;
  if (order >= 1) out[1] = t;
  for (int n = 1; n < order; ++n)
    out[n + 1] = ((2.0 * n + 1.0) * t * out[n] - n * out[n - 1]) / (n + 1.0);
}

}  // namespace

Eigen::MatrixXcd steering_matrix(const std::vector<geom::CartPoint>& directions,
                                 const std::vector<geom::CartPoint>& mic_positions,
                                 double k, double a, int order) {
  if (directions.empty() || mic_positions.empty())
    throw std::domain_error("steering_matrix: empty directions or mics");
  if (!(a > 0.0) || !(k > 0.0))
    throw std::domain_error("steering_matrix: a and k must be > 0");
  if (order < static_cast<int>(std::ceil(k * a)) + 2)
    throw std::domain_error("steering_matrix: order must be >= ceil(k a) + 2");
  if (order > specfun::kMaxOrder)
    throw std::domain_error("steering_matrix: order exceeds maximum");
  for (const auto& d : directions)
    if (std::abs(geom::norm(d) - 1.0) > 1e-9)
      throw std::domain_error("steering_matrix: directions must be unit vectors");
  for (const auto& p : mic_positions)
    if (std::abs(geom::norm(p) - a) > 1e-9)
      throw std::domain_error("steering_matrix: mics must lie on the sphere");

  // i^n (2n+1) G_n(a, a, k), shared by every entry
  std::vector<Complex> coeff(order + 1);
  Complex in_pow = 1.0;
  for (int n = 0; n <= order; ++n) {
    coeff[n] = in_pow * (2.0 * n + 1.0) * specfun::radial_propagator(n, a, a, k);
    in_pow *= Complex(0.0, 1.0);
  }

  const int q_count = static_cast<int>(mic_positions.size());
  const int l_count = static_cast<int>(directions.size());
  Eigen::MatrixXcd h(q_count, l_count);
  std::vector<double> pn;
  for (int q = 0; q < q_count; ++q) {
    const geom::CartPoint& mic = mic_positions[q];
    const double mic_norm = geom::norm(mic);
    for (int l = 0; l < l_count; ++l) {
      const double ct = std::clamp(
          geom::dot(mic, directions[l]) / mic_norm, -1.0, 1.0);
      legendre_all(order, ct, pn);
      Complex entry = 0.0;
      for (int n = 0; n <= order; ++n) entry += coeff[n] * pn[n];
      h(q, l) = entry;
    }
  }
  return h;
}

PwModel solve_amplitudes(const field::Measurements& m,
                         const std::vector<geom::CartPoint>& directions,
                         double k, double a, int steering_order, double reg) {
  if (m.pressures.empty())
    throw std::domain_error("solve_amplitudes: empty measurements");
  if (reg < 0.0) throw std::domain_error("solve_amplitudes: reg must be >= 0");

  const Eigen::MatrixXcd h =
      steering_matrix(directions, m.positions, k, a, steering_order);

  Eigen::VectorXcd p(m.pressures.size());
  for (std::size_t i = 0; i < m.pressures.size(); ++i) p(i) = m.pressures[i];

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sigma = svd.singularValues();
  const double s_max = sigma.size() > 0 ? sigma(0) : 0.0;
  if (reg == 0.0 && (s_max == 0.0 || sigma(sigma.size() - 1) < 1e-13 * s_max))
    throw std::runtime_error("solve_amplitudes: singular system with reg = 0");

  const double lam2 = reg * reg * s_max * s_max;
  Eigen::VectorXcd ut_p = svd.matrixU().adjoint() * p;
  for (int i = 0; i < sigma.size(); ++i)
    ut_p(i) *= sigma(i) / (sigma(i) * sigma(i) + lam2);
  const Eigen::VectorXcd w = svd.matrixV() * ut_p;

  PwModel model;
  model.directions = directions;
  model.k = k;
  model.reg = reg;
  model.amplitudes.assign(w.data(), w.data() + w.size());
  return model;
}

Complex reconstruct_pw(const PwModel& model, const geom::CartPoint& p) {
  if (model.directions.size() != model.amplitudes.size())
    throw std::domain_error("reconstruct_pw: directions/amplitudes mismatch");
  Complex out = 0.0;
  for (std::size_t l = 0; l < model.directions.size(); ++l) {
    const double phase = model.k * geom::dot(p, model.directions[l]);
    out += model.amplitudes[l] * std::polar(1.0, phase);
  }
  return out;
}

}  // namespace sphfield::pw
