#include "sphfield/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "sphfield/rng.hpp"

namespace sphfield::nn {

namespace {

// Symmetric 3x3 storage order: xx, yy, zz, xy, xz, yz.
constexpr int kSym = 6;

// Binary-counter pairwise summation so batch reductions are independent of
// any later parallel scheduling.
class PairwiseScalar {
 public:
  void add(double v) {
    std::size_t c = count_++;
    std::size_t level = 0;
    while (c & 1) {
      v += stack_[level];
      c >>= 1;
      ++level;
    }
    if (level >= stack_.size()) stack_.push_back(0.0);
    stack_[level] = v;
  }

  double total() const {
    double sum = 0.0;
    std::size_t c = count_;
    for (std::size_t level = 0; level < stack_.size(); ++level, c >>= 1)
      if (c & 1) sum += stack_[level];
    return sum;
  }

 private:
  std::vector<double> stack_;
  std::size_t count_ = 0;
};

class PairwiseVector {
 public:
  explicit PairwiseVector(std::size_t n) : n_(n) {}

  void add(std::span<const double> v) {
    std::size_t c = count_++;
    std::size_t level = 0;
    scratch_.assign(v.begin(), v.end());
    while (c & 1) {
      const double* s = stack_.data() + level * n_;
      for (std::size_t i = 0; i < n_; ++i) scratch_[i] += s[i];
      c >>= 1;
      ++level;
    }
    if ((level + 1) * n_ > stack_.size()) stack_.resize((level + 1) * n_, 0.0);
    std::copy(scratch_.begin(), scratch_.end(), stack_.begin() + level * n_);
  }

  void total(std::vector<double>& out) const {
    out.assign(n_, 0.0);
    std::size_t c = count_;
    for (std::size_t level = 0; level * n_ < stack_.size(); ++level, c >>= 1)
      if (c & 1)
        for (std::size_t i = 0; i < n_; ++i) out[i] += stack_[level * n_ + i];
  }

 private:
  std::size_t n_;
  std::size_t count_ = 0;
  std::vector<double> stack_;
  std::vector<double> scratch_;
};

// Per-point state: slot 0 holds the input embedding, slot l the output of
// weight layer l-1. gu/Su hold the pre-activation Jacobian/Hessian stats a
// reverse sweep needs.
struct Workspace {
  int stride = 0;
  int slots = 0;
  std::vector<double> z, g, S;
  std::vector<double> gu, Su;
  std::vector<double> zb, gb, Sb;  // adjoints
  std::vector<double> point_grad;

  void init(const MlpArch& arch) {
    stride = std::max({arch.input_dim, arch.hidden_width, arch.output_dim});
    slots = arch.layer_count() + 1;
    z.assign(static_cast<std::size_t>(slots) * stride, 0.0);
    g.assign(static_cast<std::size_t>(slots) * stride * 3, 0.0);
    S.assign(static_cast<std::size_t>(slots) * stride * kSym, 0.0);
    gu.assign(g.size(), 0.0);
    Su.assign(S.size(), 0.0);
    zb.assign(z.size(), 0.0);
    gb.assign(g.size(), 0.0);
    Sb.assign(S.size(), 0.0);
    point_grad.assign(arch.param_count(), 0.0);
  }

  double* zs(int slot) { return z.data() + static_cast<std::size_t>(slot) * stride; }
  double* gs(int slot) { return g.data() + static_cast<std::size_t>(slot) * stride * 3; }
  double* Ss(int slot) { return S.data() + static_cast<std::size_t>(slot) * stride * kSym; }
  double* gus(int slot) { return gu.data() + static_cast<std::size_t>(slot) * stride * 3; }
  double* Sus(int slot) { return Su.data() + static_cast<std::size_t>(slot) * stride * kSym; }
  double* zbs(int slot) { return zb.data() + static_cast<std::size_t>(slot) * stride; }
  double* gbs(int slot) { return gb.data() + static_cast<std::size_t>(slot) * stride * 3; }
  double* Sbs(int slot) { return Sb.data() + static_cast<std::size_t>(slot) * stride * kSym; }
};

// order: 0 value, 1 value+gradient, 2 value+gradient+Hessian.
void forward_pass(const MlpParams& p, const geom::CartPoint& x, int order,
                  Workspace& ws) {
  const MlpArch& arch = p.arch;
  double* z0 = ws.zs(0);
  z0[0] = x.x;
  z0[1] = x.y;
  z0[2] = x.z;
  if (order >= 1) {
    double* g0 = ws.gs(0);
    std::fill(g0, g0 + 3 * ws.stride, 0.0);
    g0[0 * 3 + 0] = 1.0;
    g0[1 * 3 + 1] = 1.0;
    g0[2 * 3 + 2] = 1.0;
  }
  if (order >= 2) {
    double* s0 = ws.Ss(0);
    std::fill(s0, s0 + kSym * ws.stride, 0.0);
  }

  for (int layer = 0; layer < arch.layer_count(); ++layer) {
    const bool hidden = layer < arch.hidden_layers;
    const int in_dim = arch.layer_in(layer);
    const int out_dim = arch.layer_out(layer);
    const double* w = p.values.data() + arch.weight_offset(layer);
    const double* b = p.values.data() + arch.bias_offset(layer);
    const double* zi = ws.zs(layer);
    const double* gi = ws.gs(layer);
    const double* si = ws.Ss(layer);
    double* zo = ws.zs(layer + 1);
    double* go = ws.gs(layer + 1);
    double* so = ws.Ss(layer + 1);
    double* guo = ws.gus(layer + 1);
    double* suo = ws.Sus(layer + 1);

    for (int o = 0; o < out_dim; ++o) {
      const double* row = w + static_cast<std::size_t>(o) * in_dim;
      double u = b[o];
      for (int i = 0; i < in_dim; ++i) u += row[i] * zi[i];

      double* gu_o = guo + o * 3;
      double* su_o = suo + o * kSym;
      if (order >= 1) {
        for (int d = 0; d < 3; ++d) {
          double acc = 0.0;
          for (int i = 0; i < in_dim; ++i) acc += row[i] * gi[i * 3 + d];
          gu_o[d] = acc;
        }
      }
      if (order >= 2) {
        for (int s = 0; s < kSym; ++s) {
          double acc = 0.0;
          for (int i = 0; i < in_dim; ++i) acc += row[i] * si[i * kSym + s];
          su_o[s] = acc;
        }
      }

      if (hidden) {
        const double t = std::tanh(u);
        const double s1 = 1.0 - t * t;
        zo[o] = t;
        if (order >= 1)
          for (int d = 0; d < 3; ++d) go[o * 3 + d] = s1 * gu_o[d];
        if (order >= 2) {
          const double s2 = -2.0 * t * s1;
          const double gx = gu_o[0], gy = gu_o[1], gz = gu_o[2];
          double* s_o = so + o * kSym;
          s_o[0] = s2 * gx * gx + s1 * su_o[0];
          s_o[1] = s2 * gy * gy + s1 * su_o[1];
          s_o[2] = s2 * gz * gz + s1 * su_o[2];
          s_o[3] = s2 * gx * gy + s1 * su_o[3];
          s_o[4] = s2 * gx * gz + s1 * su_o[4];
          s_o[5] = s2 * gy * gz + s1 * su_o[5];
        }
      } else {
        zo[o] = u;
        if (order >= 1)
          for (int d = 0; d < 3; ++d) go[o * 3 + d] = gu_o[d];
        if (order >= 2)
          for (int s = 0; s < kSym; ++s) so[o * kSym + s] = su_o[s];
      }
    }
  }
}

// Accumulates d(contribution)/d(params) into grad for the adjoints seeded in
// the output slot of ws. Caller zeroes the adjoint slots below the output.
void reverse_pass(const MlpParams& p, int order, Workspace& ws,
                  std::span<double> grad) {
  const MlpArch& arch = p.arch;
  for (int layer = arch.layer_count() - 1; layer >= 0; --layer) {
    const bool hidden = layer < arch.hidden_layers;
    const int in_dim = arch.layer_in(layer);
    const int out_dim = arch.layer_out(layer);
    const double* w = p.values.data() + arch.weight_offset(layer);
    double* wbar = grad.data() + arch.weight_offset(layer);
    double* bbar = grad.data() + arch.bias_offset(layer);

    const double* zi = ws.zs(layer);
    const double* gi = ws.gs(layer);
    const double* si = ws.Ss(layer);
    const double* zo = ws.zs(layer + 1);
    const double* guo = ws.gus(layer + 1);
    const double* suo = ws.Sus(layer + 1);
    double* zbo = ws.zbs(layer + 1);
    double* gbo = ws.gbs(layer + 1);
    double* sbo = ws.Sbs(layer + 1);
    double* zbi = ws.zbs(layer);
    double* gbi = ws.gbs(layer);
    double* sbi = ws.Sbs(layer);

    for (int o = 0; o < out_dim; ++o) {
      double ubar;
      double gu_bar[3] = {0.0, 0.0, 0.0};
      double su_bar[kSym] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};

      if (hidden) {
        const double t = zo[o];
        const double s1 = 1.0 - t * t;
        const double s2 = -2.0 * t * s1;
        const double* gu_o = guo + o * 3;
        const double* su_o = suo + o * kSym;
        double s1_bar = 0.0;
        double s2_bar = 0.0;

        if (order >= 2) {
          const double* sb_o = sbo + o * kSym;
          const double gx = gu_o[0], gy = gu_o[1], gz = gu_o[2];
          s2_bar += sb_o[0] * gx * gx + sb_o[1] * gy * gy + sb_o[2] * gz * gz +
                    sb_o[3] * gx * gy + sb_o[4] * gx * gz + sb_o[5] * gy * gz;
          for (int s = 0; s < kSym; ++s) {
            s1_bar += sb_o[s] * su_o[s];
            su_bar[s] = s1 * sb_o[s];
          }
          gu_bar[0] += s2 * (2.0 * sb_o[0] * gx + sb_o[3] * gy + sb_o[4] * gz);
          gu_bar[1] += s2 * (2.0 * sb_o[1] * gy + sb_o[3] * gx + sb_o[5] * gz);
          gu_bar[2] += s2 * (2.0 * sb_o[2] * gz + sb_o[4] * gx + sb_o[5] * gy);
        }
        if (order >= 1) {
          const double* gb_o = gbo + o * 3;
          for (int d = 0; d < 3; ++d) {
            s1_bar += gb_o[d] * gu_o[d];
            gu_bar[d] += s1 * gb_o[d];
          }
        }
        // s1 = 1 - t^2, s2 = -2 t + 2 t^3
        const double t_bar =
            zbo[o] + s1_bar * (-2.0 * t) + s2_bar * (6.0 * t * t - 2.0);
        ubar = t_bar * s1;
      } else {
        ubar = zbo[o];
        if (order >= 1)
          for (int d = 0; d < 3; ++d) gu_bar[d] = gbo[o * 3 + d];
        if (order >= 2)
          for (int s = 0; s < kSym; ++s) su_bar[s] = sbo[o * kSym + s];
      }

      bbar[o] += ubar;
      const double* row = w + static_cast<std::size_t>(o) * in_dim;
      double* wbar_row = wbar + static_cast<std::size_t>(o) * in_dim;
      for (int i = 0; i < in_dim; ++i) {
        double wsum = ubar * zi[i];
        zbi[i] += row[i] * ubar;
        if (order >= 1) {
          const double* gi_i = gi + i * 3;
          double* gbi_i = gbi + i * 3;
          for (int d = 0; d < 3; ++d) {
            wsum += gu_bar[d] * gi_i[d];
            gbi_i[d] += row[i] * gu_bar[d];
          }
        }
        if (order >= 2) {
          const double* si_i = si + i * kSym;
          double* sbi_i = sbi + i * kSym;
          for (int s = 0; s < kSym; ++s) {
            wsum += su_bar[s] * si_i[s];
            sbi_i[s] += row[i] * su_bar[s];
          }
        }
        wbar_row[i] += wsum;
      }
    }
  }
}

void clear_adjoints(Workspace& ws) {
  std::fill(ws.zb.begin(), ws.zb.end(), 0.0);
  std::fill(ws.gb.begin(), ws.gb.end(), 0.0);
  std::fill(ws.Sb.begin(), ws.Sb.end(), 0.0);
}

void check_inputs(const MlpParams& params, const LossOptions& opt,
                  const DataBatch& data) {
  if (params.values.size() != static_cast<std::size_t>(params.arch.param_count()))
    throw std::domain_error("nn: parameter vector size mismatch");
  if (data.positions.size() != data.pressures.size())
    throw std::domain_error("nn: data batch positions/pressures mismatch");
  if (data.positions.empty()) throw std::domain_error("nn: empty data batch");
  if (!(opt.k > 0.0)) throw std::domain_error("nn: wavenumber must be > 0");
}

}  // namespace

int MlpArch::layer_in(int layer) const {
  return layer == 0 ? input_dim : hidden_width;
}

int MlpArch::layer_out(int layer) const {
  return layer == hidden_layers ? output_dim : hidden_width;
}

int MlpArch::weight_offset(int layer) const {
  int off = 0;
  for (int l = 0; l < layer; ++l) off += layer_out(l) * (layer_in(l) + 1);
  return off;
}

int MlpArch::bias_offset(int layer) const {
  return weight_offset(layer) + layer_out(layer) * layer_in(layer);
}

int MlpArch::param_count() const {
  return weight_offset(layer_count());
}

MlpParams init_params(const MlpArch& arch, std::uint64_t seed) {
  if (arch.input_dim < 1 || arch.hidden_layers < 1 || arch.hidden_width < 1 ||
      arch.output_dim < 1)
    throw std::domain_error("init_params: all dimensions must be >= 1");

  MlpParams p;
  p.arch = arch;
  p.values.assign(arch.param_count(), 0.0);
  rng::Xoshiro256ss gen(seed);
  for (int layer = 0; layer < arch.layer_count(); ++layer) {
    const int fan_in = arch.layer_in(layer);
    const int fan_out = arch.layer_out(layer);
    const double s = std::sqrt(6.0 / (fan_in + fan_out));
    double* w = p.values.data() + arch.weight_offset(layer);
    for (int i = 0; i < fan_out * fan_in; ++i)
      w[i] = (2.0 * gen.uniform01() - 1.0) * s;
    // biases stay zero
  }
  return p;
}

std::array<double, 2> forward(const MlpParams& params, const geom::CartPoint& x) {
  Workspace ws;
  ws.init(params.arch);
  forward_pass(params, x, 0, ws);
  const double* y = ws.zs(params.arch.layer_count());
  return {y[0], y[1]};
}

InputDerivatives input_derivatives(const MlpParams& params,
                                   const geom::CartPoint& x) {
  Workspace ws;
  ws.init(params.arch);
  forward_pass(params, x, 2, ws);
  const int out_slot = params.arch.layer_count();
  const double* y = ws.zs(out_slot);
  const double* gy = ws.gs(out_slot);
  const double* sy = ws.Ss(out_slot);

  InputDerivatives d;
  for (int j = 0; j < 2; ++j) {
    d.value[j] = y[j];
    for (int dim = 0; dim < 3; ++dim) d.gradient[j][dim] = gy[j * 3 + dim];
    d.laplacian[j] = sy[j * kSym + 0] + sy[j * kSym + 1] + sy[j * kSym + 2];
  }
  return d;
}

LossTerms loss_and_gradient(const MlpParams& params, const DataBatch& data,
                            std::span<const geom::CartPoint> pde_points,
                            std::span<const geom::CartPoint> bc_points,
                            const LossOptions& opt,
                            const std::array<double, 3>& weights,
                            std::vector<double>& grad_out) {
  check_inputs(params, opt, data);

  Workspace ws;
  ws.init(params.arch);
  const int out_slot = params.arch.layer_count();
  const double kappa = opt.helmholtz_coefficient();
  const std::size_t n_params = params.values.size();
  PairwiseVector grad_acc(n_params);
  PairwiseScalar acc_data, acc_pde, acc_bc;

  const double q_count = static_cast<double>(data.positions.size());
  for (std::size_t i = 0; i < data.positions.size(); ++i) {
    forward_pass(params, data.positions[i], 0, ws);
    const double* y = ws.zs(out_slot);
    const double e0 = y[0] - data.pressures[i].real();
    const double e1 = y[1] - data.pressures[i].imag();
    acc_data.add(e0 * e0 + e1 * e1);

    clear_adjoints(ws);
    double* zb = ws.zbs(out_slot);
    const double wf = weights[0] / q_count;
    zb[0] = wf * 2.0 * e0;
    zb[1] = wf * 2.0 * e1;
    std::fill(ws.point_grad.begin(), ws.point_grad.end(), 0.0);
    reverse_pass(params, 0, ws, ws.point_grad);
    grad_acc.add(ws.point_grad);
  }

  if (!pde_points.empty()) {
    const double d_count = static_cast<double>(pde_points.size());
    for (const auto& x : pde_points) {
      forward_pass(params, x, 2, ws);
      const double* y = ws.zs(out_slot);
      const double* sy = ws.Ss(out_slot);
      double res[2];
      double contrib = 0.0;
      for (int j = 0; j < 2; ++j) {
        const double lap =
            sy[j * kSym + 0] + sy[j * kSym + 1] + sy[j * kSym + 2];
        res[j] = lap + kappa * y[j];
        contrib += res[j] * res[j];
      }
      acc_pde.add(contrib);

      clear_adjoints(ws);
      double* zb = ws.zbs(out_slot);
      double* sb = ws.Sbs(out_slot);
      const double wf = weights[1] / d_count;
      for (int j = 0; j < 2; ++j) {
        zb[j] = wf * 2.0 * res[j] * kappa;
        sb[j * kSym + 0] = wf * 2.0 * res[j];
        sb[j * kSym + 1] = wf * 2.0 * res[j];
        sb[j * kSym + 2] = wf * 2.0 * res[j];
      }
      std::fill(ws.point_grad.begin(), ws.point_grad.end(), 0.0);
      reverse_pass(params, 2, ws, ws.point_grad);
      grad_acc.add(ws.point_grad);
    }
  }

  if (!bc_points.empty()) {
    const double b_count = static_cast<double>(bc_points.size());
    for (const auto& x : bc_points) {
      forward_pass(params, x, 1, ws);
      const double* gy = ws.gs(out_slot);
      double res[2];
      double contrib = 0.0;
      for (int j = 0; j < 2; ++j) {
        res[j] = x.x * gy[j * 3 + 0] + x.y * gy[j * 3 + 1] + x.z * gy[j * 3 + 2];
        contrib += res[j] * res[j];
      }
      acc_bc.add(contrib);

      clear_adjoints(ws);
      double* gb = ws.gbs(out_slot);
      const double wf = weights[2] / b_count;
      for (int j = 0; j < 2; ++j) {
        gb[j * 3 + 0] = wf * 2.0 * res[j] * x.x;
        gb[j * 3 + 1] = wf * 2.0 * res[j] * x.y;
        gb[j * 3 + 2] = wf * 2.0 * res[j] * x.z;
      }
      std::fill(ws.point_grad.begin(), ws.point_grad.end(), 0.0);
      reverse_pass(params, 1, ws, ws.point_grad);
      grad_acc.add(ws.point_grad);
    }
  }

  grad_acc.total(grad_out);

  LossTerms terms;
  terms.l_data = acc_data.total() / q_count;
  terms.l_pde =
      pde_points.empty() ? 0.0 : acc_pde.total() / static_cast<double>(pde_points.size());
  terms.l_bc =
      bc_points.empty() ? 0.0 : acc_bc.total() / static_cast<double>(bc_points.size());
  return terms;
}

LossTerms loss_terms(const MlpParams& params, const DataBatch& data,
                     std::span<const geom::CartPoint> pde_points,
                     std::span<const geom::CartPoint> bc_points,
                     const LossOptions& opt) {
  check_inputs(params, opt, data);

  Workspace ws;
  ws.init(params.arch);
  const int out_slot = params.arch.layer_count();
  const double kappa = opt.helmholtz_coefficient();
  PairwiseScalar acc_data, acc_pde, acc_bc;

  for (std::size_t i = 0; i < data.positions.size(); ++i) {
    forward_pass(params, data.positions[i], 0, ws);
    const double* y = ws.zs(out_slot);
    const double e0 = y[0] - data.pressures[i].real();
    const double e1 = y[1] - data.pressures[i].imag();
    acc_data.add(e0 * e0 + e1 * e1);
  }
  for (const auto& x : pde_points) {
    forward_pass(params, x, 2, ws);
    const double* y = ws.zs(out_slot);
    const double* sy = ws.Ss(out_slot);
    double contrib = 0.0;
    for (int j = 0; j < 2; ++j) {
      const double lap = sy[j * kSym + 0] + sy[j * kSym + 1] + sy[j * kSym + 2];
      const double res = lap + kappa * y[j];
      contrib += res * res;
    }
    acc_pde.add(contrib);
  }
  for (const auto& x : bc_points) {
    forward_pass(params, x, 1, ws);
    const double* gy = ws.gs(out_slot);
    double contrib = 0.0;
    for (int j = 0; j < 2; ++j) {
      const double res =
          x.x * gy[j * 3 + 0] + x.y * gy[j * 3 + 1] + x.z * gy[j * 3 + 2];
      contrib += res * res;
    }
    acc_bc.add(contrib);
  }

  LossTerms terms;
  terms.l_data = acc_data.total() / static_cast<double>(data.positions.size());
  terms.l_pde = pde_points.empty()
                    ? 0.0
                    : acc_pde.total() / static_cast<double>(pde_points.size());
  terms.l_bc = bc_points.empty()
                   ? 0.0
                   : acc_bc.total() / static_cast<double>(bc_points.size());
  return terms;
}

std::vector<double> param_gradient(const MlpParams& params, const DataBatch& data,
                                   std::span<const geom::CartPoint> pde_points,
                                   std::span<const geom::CartPoint> bc_points,
                                   const LossOptions& opt,
                                   const std::array<double, 3>& weights) {
  std::vector<double> grad;
  loss_and_gradient(params, data, pde_points, bc_points, opt, weights, grad);
  return grad;
}

void save_checkpoint(const MlpParams& params, std::ostream& out) {
  out << "sphfield-mlp-v1\n";
  out << "arch " << params.arch.input_dim << ' ' << params.arch.hidden_layers
      << ' ' << params.arch.hidden_width << ' ' << params.arch.output_dim << '\n';
  out << "count " << params.values.size() << '\n';
  char buf[40];
  for (double v : params.values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << '\n';
  }
}

MlpParams load_checkpoint(std::istream& in) {
  std::string magic;
  if (!(in >> magic) || magic != "sphfield-mlp-v1")
    throw std::runtime_error("checkpoint: bad magic line");
  std::string tag;
  MlpParams p;
  if (!(in >> tag) || tag != "arch")
    throw std::runtime_error("checkpoint: missing arch line");
  if (!(in >> p.arch.input_dim >> p.arch.hidden_layers >> p.arch.hidden_width >>
        p.arch.output_dim))
    throw std::runtime_error("checkpoint: malformed arch line");
  std::size_t count = 0;
  if (!(in >> tag) || tag != "count" || !(in >> count))
    throw std::runtime_error("checkpoint: malformed count line");
  if (count != static_cast<std::size_t>(p.arch.param_count()))
    throw std::runtime_error("checkpoint: count does not match architecture");
  p.values.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    if (!(in >> p.values[i]))
      throw std::runtime_error("checkpoint: truncated value list");
  return p;
}

}  // namespace sphfield::nn
