#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "sphfield/geom.hpp"
#include "sphfield/nn.hpp"
#include "sphfield/rng.hpp"
#include "test_helpers.hpp"

namespace geom = sphfield::geom;
namespace nn = sphfield::nn;
using test_helpers::Complex;

namespace {

// Straight-line scalar re-implementation of the forward pass, reading the
// flat parameter vector directly.
std::array<double, 2> forward_oracle(const nn::MlpParams& p, const geom::CartPoint& pt) {
  std::vector<double> cur = {pt.x, pt.y, pt.z};
  std::size_t off = 0;
  const int layers = p.arch.hidden_layers + 1;
  for (int l = 0; l < layers; ++l) {
    const int in_dim = (l == 0) ? p.arch.input_dim : p.arch.hidden_width;
    const int out_dim = (l == layers - 1) ? p.arch.output_dim : p.arch.hidden_width;
    std::vector<double> next(out_dim, 0.0);
    for (int o = 0; o < out_dim; ++o) {
      double u = 0.0;
      for (int i = 0; i < in_dim; ++i) u += p.values[off + o * in_dim + i] * cur[i];
      u += p.values[off + static_cast<std::size_t>(out_dim) * in_dim + o];
      next[o] = (l == layers - 1) ? u : std::tanh(u);
    }
    off += static_cast<std::size_t>(out_dim) * (in_dim + 1);
    cur = std::move(next);
  }
  return {cur[0], cur[1]};
}

geom::CartPoint shifted(const geom::CartPoint& x, int dim, double h) {
  geom::CartPoint y = x;
  (dim == 0 ? y.x : dim == 1 ? y.y : y.z) += h;
  return y;
}

double weighted_total(const nn::LossTerms& t, const std::array<double, 3>& w) {
  return w[0] * t.l_data + w[1] * t.l_pde + w[2] * t.l_bc;
}

struct TinyBatch {
  std::vector<geom::CartPoint> data_x;
  std::vector<Complex> data_p;
  std::vector<geom::CartPoint> pde_x;
  std::vector<geom::CartPoint> bc_x;
};

TinyBatch tiny_batch(std::uint64_t seed) {
  TinyBatch b;
  b.data_x = geom::fibonacci_sphere(4, 0.042);
  sphfield::rng::Xoshiro256ss gen(seed);
  for (int i = 0; i < 4; ++i) {
    const auto [g0, g1] = gen.normal_pair();
    b.data_p.push_back(Complex(0.4 * g0, 0.4 * g1));
  }
  b.pde_x = geom::random_shell(8, 0.042, 0.15, seed + 1);
  b.bc_x = geom::fibonacci_sphere(8, 0.042);
  return b;
}

}  // namespace

TEST_SUITE_BEGIN("nn");

TEST_CASE("parameter layout") {
  const nn::MlpArch arch;
  CHECK(arch.param_count() == 16 + 20 + 20 + 10);
  CHECK(arch.layer_in(0) == 3);
  CHECK(arch.layer_out(3) == 2);
  CHECK(arch.bias_offset(0) == 12);
}

TEST_CASE("init determinism, zero biases, glorot variance") {
  const nn::MlpArch arch;
  const auto a = nn::init_params(arch, 5);
  const auto b = nn::init_params(arch, 5);
  CHECK(a.values == b.values);
  const auto c = nn::init_params(arch, 6);
  CHECK(a.values != c.values);

  for (int layer = 0; layer < arch.layer_count(); ++layer) {
    const int off = arch.bias_offset(layer);
    for (int i = 0; i < arch.layer_out(layer); ++i) CHECK(a.values[off + i] == 0.0);
  }

  // first-layer weights across 1000 seeds: variance within 5% of s^2/3
  double sum = 0.0, sum2 = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto p = nn::init_params(arch, seed);
    for (int i = 0; i < 12; ++i) {
      sum += p.values[i];
      sum2 += p.values[i] * p.values[i];
      ++count;
    }
  }
  const double mean = sum / count;
  const double var = sum2 / count - mean * mean;
  const double s = std::sqrt(6.0 / (3 + 4));
  CHECK(std::abs(var / (s * s / 3.0) - 1.0) < 0.05);
}

TEST_CASE("forward special cases") {
  const nn::MlpArch arch;
  nn::MlpParams zero;
  zero.arch = arch;
  zero.values.assign(arch.param_count(), 0.0);
  const auto y = nn::forward(zero, {0.3, -0.2, 0.9});
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 0.0);

  nn::MlpParams biased = zero;
  biased.values[arch.bias_offset(arch.hidden_layers) + 0] = 0.7;
  biased.values[arch.bias_offset(arch.hidden_layers) + 1] = -1.3;
  for (const geom::CartPoint x : {geom::CartPoint{0, 0, 0}, geom::CartPoint{1, 2, 3}}) {
    const auto yb = nn::forward(biased, x);
    CHECK(yb[0] == 0.7);
    CHECK(yb[1] == -1.3);
  }
}

TEST_CASE("forward matches the straight-line oracle") {
  const auto params = nn::init_params(nn::MlpArch{}, 0);
  const geom::CartPoint x{0.05, 0.0, 0.0};
  const auto fast = nn::forward(params, x);
  const auto slow = forward_oracle(params, x);
  CHECK(std::abs(fast[0] - slow[0]) < 1e-14);
  CHECK(std::abs(fast[1] - slow[1]) < 1e-14);

  sphfield::rng::Xoshiro256ss gen(2);
  for (int i = 0; i < 10; ++i) {
    const geom::CartPoint p{0.2 * gen.uniform01() - 0.1, 0.2 * gen.uniform01() - 0.1,
                            0.2 * gen.uniform01() - 0.1};
    const auto f = nn::forward(params, p);
    const auto s = forward_oracle(params, p);
    CHECK(std::abs(f[0] - s[0]) < 1e-14);
    CHECK(std::abs(f[1] - s[1]) < 1e-14);
  }
}

TEST_CASE("derivatives at the origin reduce to the chained weight product") {
  // with zero biases every tanh sits at 0: gradient is the product of the
  // weight matrices and the laplacian vanishes (tanh'' (0) = 0)
  const nn::MlpArch arch;
  auto params = nn::init_params(arch, 11);  // biases already zero
  const auto d = nn::input_derivatives(params, {0, 0, 0});

  // chain product computed in plain loops
  std::vector<std::vector<double>> jac = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int l = 0; l < arch.layer_count(); ++l) {
    const int in_dim = arch.layer_in(l);
    const int out_dim = arch.layer_out(l);
    std::vector<std::vector<double>> next(out_dim, std::vector<double>(3, 0.0));
    const double* w = params.values.data() + arch.weight_offset(l);
    for (int o = 0; o < out_dim; ++o)
      for (int dim = 0; dim < 3; ++dim)
        for (int i = 0; i < in_dim; ++i)
          next[o][dim] += w[o * in_dim + i] * jac[i][dim];
    jac = std::move(next);
  }
  for (int j = 0; j < 2; ++j) {
    CHECK(d.laplacian[j] == 0.0);
    for (int dim = 0; dim < 3; ++dim)
      CHECK(d.gradient[j][dim] == doctest::Approx(jac[j][dim]).epsilon(1e-14));
  }
}

TEST_CASE("input gradient and laplacian match finite differences") {
  sphfield::rng::Xoshiro256ss gen(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto params = nn::init_params(nn::MlpArch{}, 100 + trial);
    const geom::CartPoint x{0.05 + 0.1 * gen.uniform01(),
                            0.1 * gen.uniform01() - 0.05,
                            0.1 * gen.uniform01() - 0.05};
    const auto d = nn::input_derivatives(params, x);

    const double h = 1e-5;
    for (int dim = 0; dim < 3; ++dim) {
      const auto yp = nn::forward(params, shifted(x, dim, h));
      const auto ym = nn::forward(params, shifted(x, dim, -h));
      for (int j = 0; j < 2; ++j) {
        const double fd = (yp[j] - ym[j]) / (2 * h);
        CHECK(std::abs(d.gradient[j][dim] - fd) <
              1e-6 * std::max(1.0, std::abs(fd)));
      }
    }

    const double h2 = 1e-4;
    const auto y0 = nn::forward(params, x);
    double lap_fd[2] = {0, 0};
    for (int dim = 0; dim < 3; ++dim) {
      const auto yp = nn::forward(params, shifted(x, dim, h2));
      const auto ym = nn::forward(params, shifted(x, dim, -h2));
      for (int j = 0; j < 2; ++j)
        lap_fd[j] += (yp[j] - 2 * y0[j] + ym[j]) / (h2 * h2);
    }
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(d.laplacian[j] - lap_fd[j]) <
            1e-5 * std::max(1.0, std::abs(lap_fd[j])));
  }
}

TEST_CASE("loss terms forced values") {
  const nn::MlpArch arch;
  nn::MlpParams zero;
  zero.arch = arch;
  zero.values.assign(arch.param_count(), 0.0);

  const double k = 18.3;
  nn::LossOptions opt;
  opt.k = k;

  std::vector<geom::CartPoint> data_x = {{0.042, 0, 0}, {0, 0.042, 0}};
  std::vector<Complex> data_p = {Complex(0, 0), Complex(0, 0)};
  const auto pde = geom::random_shell(16, 0.042, 0.15, 3);
  const auto bc = geom::fibonacci_sphere(16, 0.042);

  const auto t0 = nn::loss_terms(zero, {data_x, data_p}, pde, bc, opt);
  CHECK(t0.l_data == 0.0);
  CHECK(t0.l_pde == 0.0);
  CHECK(t0.l_bc == 0.0);

  // constant output (c1, c2): l_pde = k^4 (c1^2 + c2^2), l_bc = 0
  nn::MlpParams constant = zero;
  constant.values[arch.bias_offset(arch.hidden_layers) + 0] = 0.3;
  constant.values[arch.bias_offset(arch.hidden_layers) + 1] = -0.1;
  const auto tc = nn::loss_terms(constant, {data_x, data_p}, pde, bc, opt);
  const double c_sq = 0.3 * 0.3 + 0.1 * 0.1;
  CHECK(tc.l_pde == doctest::Approx(k * k * k * k * c_sq).epsilon(1e-12));
  CHECK(tc.l_bc == 0.0);
  CHECK(tc.l_data == doctest::Approx(c_sq).epsilon(1e-12));

  // inverse-coefficient toggle swaps k^2 for (1/k)^2 in the residual
  nn::LossOptions literal = opt;
  literal.use_inverse_k_coefficient = true;
  const auto tl = nn::loss_terms(constant, {data_x, data_p}, pde, bc, literal);
  const double inv_k2 = 1.0 / (k * k);
  CHECK(tl.l_pde == doctest::Approx(inv_k2 * inv_k2 * c_sq).epsilon(1e-12));

  CHECK_THROWS_AS(nn::loss_terms(zero, {{}, {}}, pde, bc, opt), std::domain_error);
}

TEST_CASE("composite parameter gradient matches finite differences") {
  const auto params = nn::init_params(nn::MlpArch{}, 0);
  const auto batch = tiny_batch(55);
  nn::LossOptions opt;
  opt.k = 18.3;
  const std::array<double, 3> w{1.0, 1.0 / (18.3 * 18.3), 0.042};

  const auto grad = nn::param_gradient(
      params, {batch.data_x, batch.data_p}, batch.pde_x, batch.bc_x, opt, w);

  double max_fd = 0.0;
  std::vector<double> fd(grad.size());
  const double h = 1e-6;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    nn::MlpParams pp = params, pm = params;
    pp.values[i] += h;
    pm.values[i] -= h;
    const double lp = weighted_total(
        nn::loss_terms(pp, {batch.data_x, batch.data_p}, batch.pde_x, batch.bc_x, opt), w);
    const double lm = weighted_total(
        nn::loss_terms(pm, {batch.data_x, batch.data_p}, batch.pde_x, batch.bc_x, opt), w);
    fd[i] = (lp - lm) / (2 * h);
    max_fd = std::max(max_fd, std::abs(fd[i]));
  }
  REQUIRE(max_fd > 0.0);
  for (std::size_t i = 0; i < grad.size(); ++i)
    CHECK(std::abs(grad[i] - fd[i]) < 1e-5 * max_fd);
}

TEST_CASE("gradient properties") {
  const auto params = nn::init_params(nn::MlpArch{}, 7);
  const auto batch = tiny_batch(91);
  nn::LossOptions opt;
  opt.k = 18.3;

  // zero parameters and zero data: the data term has zero gradient
  nn::MlpParams zero = params;
  zero.values.assign(zero.values.size(), 0.0);
  std::vector<Complex> zero_p(batch.data_x.size(), Complex(0, 0));
  const auto g0 = nn::param_gradient(zero, {batch.data_x, zero_p}, {}, {}, opt,
                                     {1.0, 0.0, 0.0});
  for (double g : g0) CHECK(g == 0.0);

  // linearity in the loss weights, exact for a power-of-two scaling
  const std::array<double, 3> w{0.8, 2.5e-3, 0.042};
  const std::array<double, 3> w2{1.6, 5.0e-3, 0.084};
  const auto g1 = nn::param_gradient(params, {batch.data_x, batch.data_p},
                                     batch.pde_x, batch.bc_x, opt, w);
  const auto g2 = nn::param_gradient(params, {batch.data_x, batch.data_p},
                                     batch.pde_x, batch.bc_x, opt, w2);
  for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g2[i] == 2.0 * g1[i]);
}

TEST_CASE("loss evaluation is bitwise stable") {
  const auto params = nn::init_params(nn::MlpArch{}, 3);
  const auto batch = tiny_batch(17);
  nn::LossOptions opt;
  opt.k = 18.3;
  const auto a =
      nn::loss_terms(params, {batch.data_x, batch.data_p}, batch.pde_x, batch.bc_x, opt);
  const auto b =
      nn::loss_terms(params, {batch.data_x, batch.data_p}, batch.pde_x, batch.bc_x, opt);
  CHECK(a.l_data == b.l_data);
  CHECK(a.l_pde == b.l_pde);
  CHECK(a.l_bc == b.l_bc);
}

TEST_CASE("checkpoint round trip") {
  const auto params = nn::init_params(nn::MlpArch{}, 12345);
  std::stringstream ss;
  nn::save_checkpoint(params, ss);
  const auto loaded = nn::load_checkpoint(ss);
  CHECK(loaded.arch == params.arch);
  REQUIRE(loaded.values.size() == params.values.size());
  for (std::size_t i = 0; i < params.values.size(); ++i)
    CHECK(loaded.values[i] == params.values[i]);

  std::stringstream bad("not-a-checkpoint\n");
  CHECK_THROWS(nn::load_checkpoint(bad));
  std::stringstream truncated("sphfield-mlp-v1\narch 3 3 4 2\ncount 66\n1.0\n");
  CHECK_THROWS(nn::load_checkpoint(truncated));
}

TEST_SUITE_END();
