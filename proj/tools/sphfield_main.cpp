// Command-line front end: simulate measurements, train the network, run the
// estimators, and export every artifact as CSV.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sphfield/config.hpp"
#include "sphfield/csv.hpp"
#include "sphfield/eval.hpp"
#include "sphfield/field.hpp"
#include "sphfield/geom.hpp"
#include "sphfield/nn.hpp"
#include "sphfield/pw_estimator.hpp"
#include "sphfield/rng.hpp"
#include "sphfield/sh_estimator.hpp"
#include "sphfield/specfun.hpp"
#include "sphfield/train.hpp"

namespace {

namespace fs = std::filesystem;
using sphfield::config::RunConfig;
using sphfield::specfun::Complex;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> epochs;
};

RunConfig load(const CommonArgs& args) {
  RunConfig cfg = args.config_path.empty()
                      ? RunConfig{}
                      : sphfield::config::load_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  if (args.out_dir) cfg.out_dir = *args.out_dir;
  if (args.epochs) {
    if (*args.epochs < 1)
      throw sphfield::config::ConfigError("train.epochs", "must be >= 1");
    cfg.train.epochs = *args.epochs;
  }
  sphfield::config::validate(cfg);
  return cfg;
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  const fs::path path = fs::path(cfg.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  std::cout << "writing " << path.string() << "\n";
  return out;
}

sphfield::field::Measurements simulate_measurements(const RunConfig& cfg) {
  sphfield::field::Measurements m;
  m.positions = sphfield::geom::mic_array_layout(cfg.scene.a);
  for (const auto& p : m.positions)
    m.pressures.push_back(sphfield::field::scene_pressure(cfg.scene, p));
  m = sphfield::field::add_noise(m, cfg.snr_db, cfg.seed);
  return sphfield::field::normalize(m);
}

sphfield::field::Measurements read_measurements_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open measurements file " + path);
  return sphfield::csv::read_measurements(in);
}

sphfield::nn::MlpParams read_checkpoint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error(
        "cannot open checkpoint file " + path +
        " (run the train command first or pass --checkpoint)");
  return sphfield::nn::load_checkpoint(in);
}

std::vector<sphfield::geom::CartPoint> mic_directions(const RunConfig& cfg) {
  // validate() restricts array_layout to pentakis32
  (void)cfg;
  return sphfield::geom::mic_array_layout(1.0);
}

int cmd_simulate(const CommonArgs& args) {
  const RunConfig cfg = load(args);
  const auto m = simulate_measurements(cfg);
  auto out = open_out(cfg, "measurements.csv");
  sphfield::csv::write_measurements(out, m);
  std::cout << "k = " << cfg.scene.wavenumber() << " 1/m, scale = " << m.scale
            << ", mics = " << m.positions.size() << "\n";
  return kExitOk;
}

int cmd_train(const CommonArgs& args, const std::string& measurements_path) {
  const RunConfig cfg = load(args);
  const auto m = measurements_path.empty() ? simulate_measurements(cfg)
                                           : read_measurements_file(measurements_path);
  const auto result = sphfield::train::train(cfg.scene, m, cfg.train, cfg.seed);
  {
    auto out = open_out(cfg, "checkpoint.txt");
    sphfield::nn::save_checkpoint(result.params, out);
  }
  {
    auto out = open_out(cfg, "loss_log.csv");
    sphfield::csv::write_loss_log(out, result.history);
  }
  const auto& first = result.history.front();
  const auto& last = result.history.back();
  std::cout << "epochs = " << result.history.size()
            << ", total loss " << first.weighted_total << " -> "
            << last.weighted_total << "\n";
  return kExitOk;
}

std::vector<sphfield::geom::CartPoint> estimate_points(const RunConfig& cfg,
                                                       const std::string& points_path) {
  if (!points_path.empty()) {
    std::ifstream in(points_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open points file " + points_path);
    return sphfield::csv::read_points(in);
  }
  std::vector<sphfield::geom::CartPoint> pts;
  for (const auto& s : sphfield::geom::sphere_grid(
           cfg.eval.slice.radius, cfg.eval.slice.n_theta, cfg.eval.slice.n_phi))
    pts.push_back(sphfield::geom::sph_to_cart(s));
  return pts;
}

int cmd_estimate(const CommonArgs& args, const std::string& method,
                 const std::string& measurements_path,
                 const std::string& points_path,
                 const std::string& checkpoint_path) {
  const RunConfig cfg = load(args);
  const auto m = measurements_path.empty() ? simulate_measurements(cfg)
                                           : read_measurements_file(measurements_path);
  const auto pts = estimate_points(cfg, points_path);
  const double k = cfg.scene.wavenumber();

  sphfield::eval::FieldEstimator est;
  if (method == "sh") {
    const auto coeffs =
        sphfield::sh::estimate_coeffs(m, cfg.sh.order, k, cfg.scene.a);
    auto out = open_out(cfg, "sh_coeffs.csv");
    sphfield::csv::write_coeffs(out, coeffs);
    est = sphfield::eval::make_sh_estimator(coeffs);
  } else if (method == "pl") {
    const auto model = sphfield::pw::solve_amplitudes(
        m, mic_directions(cfg), k, cfg.scene.a, cfg.pw.steering_order,
        cfg.pw.reg_rel);
    auto out = open_out(cfg, "pl_amplitudes.csv");
    sphfield::csv::write_amplitudes(out, model);
    est = sphfield::eval::make_pw_estimator(model);
  } else if (method == "pinn") {
    const fs::path fallback = fs::path(cfg.out_dir) / "checkpoint.txt";
    const auto params = read_checkpoint_file(
        checkpoint_path.empty() ? fallback.string() : checkpoint_path);
    est = sphfield::eval::make_pinn_estimator(params);
  } else {
    throw sphfield::config::ConfigError("method", "must be sh, pl, or pinn");
  }

  std::vector<Complex> values;
  values.reserve(pts.size());
  for (const auto& p : pts) values.push_back(est(p));
  auto out = open_out(cfg, "estimate_" + method + ".csv");
  sphfield::csv::write_field_values(out, pts, values);
  std::cout << "rows = " << pts.size() << "\n";
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args, const std::string& checkpoint_path) {
  const RunConfig cfg = load(args);
  const auto m = simulate_measurements(cfg);
  const double k = cfg.scene.wavenumber();

  const auto coeffs = sphfield::sh::estimate_coeffs(m, cfg.sh.order, k, cfg.scene.a);
  const auto model = sphfield::pw::solve_amplitudes(
      m, mic_directions(cfg), k, cfg.scene.a, cfg.pw.steering_order,
      cfg.pw.reg_rel);
  sphfield::nn::MlpParams params;
  if (checkpoint_path.empty()) {
    params = sphfield::train::train(cfg.scene, m, cfg.train, cfg.seed).params;
  } else {
    params = read_checkpoint_file(checkpoint_path);
  }

  const auto truth = sphfield::eval::make_ground_truth(cfg.scene, m.scale);
  const std::vector<sphfield::eval::FieldEstimator> estimators = {
      sphfield::eval::make_sh_estimator(coeffs),
      sphfield::eval::make_pw_estimator(model),
      sphfield::eval::make_pinn_estimator(params)};
  const auto table = sphfield::eval::radius_sweep(
      truth, estimators, cfg.eval.radii, cfg.eval.points_per_radius, cfg.seed,
      cfg.scene.a);

  auto out = open_out(cfg, "sweep.csv");
  sphfield::csv::write_sweep(out, table);
  std::cout << "radii = " << table.radii.size() << "\n";
  return kExitOk;
}

int cmd_slice(const CommonArgs& args, const std::string& method,
              const std::string& checkpoint_path) {
  const RunConfig cfg = load(args);
  const auto m = simulate_measurements(cfg);
  const double k = cfg.scene.wavenumber();
  const auto truth = sphfield::eval::make_ground_truth(cfg.scene, m.scale);

  sphfield::eval::FieldEstimator est;
  if (method == "sh") {
    est = sphfield::eval::make_sh_estimator(
        sphfield::sh::estimate_coeffs(m, cfg.sh.order, k, cfg.scene.a));
  } else if (method == "pl") {
    est = sphfield::eval::make_pw_estimator(sphfield::pw::solve_amplitudes(
        m, mic_directions(cfg), k, cfg.scene.a, cfg.pw.steering_order,
        cfg.pw.reg_rel));
  } else if (method == "pinn") {
    const fs::path fallback = fs::path(cfg.out_dir) / "checkpoint.txt";
    est = sphfield::eval::make_pinn_estimator(read_checkpoint_file(
        checkpoint_path.empty() ? fallback.string() : checkpoint_path));
  } else if (method == "truth") {
    est = truth;
  } else {
    throw sphfield::config::ConfigError("method", "must be sh, pl, pinn, or truth");
  }

  const auto rows = sphfield::eval::field_slice(
      truth, est, cfg.eval.slice.radius, cfg.eval.slice.n_theta,
      cfg.eval.slice.n_phi);
  auto out = open_out(cfg, "slice_" + method + ".csv");
  sphfield::csv::write_slice(out, rows);
  std::cout << "rows = " << rows.size() << "\n";
  return kExitOk;
}

bool check(bool ok, const std::string& label, int& failures) {
  std::cout << (ok ? "PASS " : "FAIL ") << label << "\n";
  if (!ok) ++failures;
  return ok;
}

// Quick self-contained property suites over the special functions and the
// network differentiation.
int cmd_verify() {
  namespace sf = sphfield::specfun;
  int failures = 0;

  {
    bool ok = true;
    for (int n = 0; n <= 8 && ok; ++n)
      for (double x : {0.1, 0.77, 2.5, 10.0}) {
        const double w = sf::sph_bessel_j(n, x) * sf::sph_bessel_y_prime(n, x) -
                         sf::sph_bessel_j_prime(n, x) * sf::sph_bessel_y(n, x);
        if (std::abs(w - 1.0 / (x * x)) > 1e-9 / (x * x)) ok = false;
      }
    check(ok, "wronskian identity, n <= 8", failures);
  }
  {
    bool ok = true;
    sphfield::rng::Xoshiro256ss gen(11);
    for (int trial = 0; trial < 10; ++trial) {
      const double t1 = std::acos(2.0 * gen.uniform01() - 1.0);
      const double p1 = 2.0 * 3.14159265358979323846 * gen.uniform01();
      const double t2 = std::acos(2.0 * gen.uniform01() - 1.0);
      const double p2 = 2.0 * 3.14159265358979323846 * gen.uniform01();
      Complex lhs = 0.0;
      for (int m = -3; m <= 3; ++m)
        lhs += sf::sph_harmonic(3, m, t1, p1) * std::conj(sf::sph_harmonic(3, m, t2, p2));
      const double cosg = std::cos(t1) * std::cos(t2) +
                          std::sin(t1) * std::sin(t2) * std::cos(p1 - p2);
      const double rhs = 7.0 / (4.0 * 3.14159265358979323846) *
                         sf::legendre_p(3, std::clamp(cosg, -1.0, 1.0));
      if (std::abs(lhs - rhs) > 1e-12) ok = false;
    }
    check(ok, "spherical-harmonic addition theorem, n = 3", failures);
  }
  {
    bool ok = true;
    const double k = 18.0, a = 0.042;
    for (int n = 0; n <= 6; ++n) {
      const double gp = std::abs(sf::radial_propagator_prime(n, a, a, k));
      const double g = std::abs(sf::radial_propagator(n, a, a, k));
      if (gp > 1e-12 * k * g) ok = false;
    }
    check(ok, "rigid-boundary derivative zero at r = a", failures);
  }
  {
    const sphfield::nn::MlpArch arch;
    const auto params = sphfield::nn::init_params(arch, 0);
    bool grad_ok = true, lap_ok = true;
    sphfield::rng::Xoshiro256ss gen(5);
    for (int trial = 0; trial < 20; ++trial) {
      sphfield::geom::CartPoint x{0.05 + 0.1 * gen.uniform01(),
                                  0.1 * gen.uniform01() - 0.05,
                                  0.1 * gen.uniform01() - 0.05};
      const auto d = sphfield::nn::input_derivatives(params, x);
      const double h = 1e-5;
      for (int dim = 0; dim < 3; ++dim) {
        auto xp = x, xm = x;
        (dim == 0 ? xp.x : dim == 1 ? xp.y : xp.z) += h;
        (dim == 0 ? xm.x : dim == 1 ? xm.y : xm.z) -= h;
        const auto yp = sphfield::nn::forward(params, xp);
        const auto ym = sphfield::nn::forward(params, xm);
        for (int j = 0; j < 2; ++j) {
          const double fd = (yp[j] - ym[j]) / (2.0 * h);
          if (std::abs(fd - d.gradient[j][dim]) >
              1e-6 * std::max(1.0, std::abs(fd)))
            grad_ok = false;
        }
      }
      const double h2 = 1e-4;
      const auto y0 = sphfield::nn::forward(params, x);
      double lap_fd[2] = {0.0, 0.0};
      for (int dim = 0; dim < 3; ++dim) {
        auto xp = x, xm = x;
        (dim == 0 ? xp.x : dim == 1 ? xp.y : xp.z) += h2;
        (dim == 0 ? xm.x : dim == 1 ? xm.y : xm.z) -= h2;
        const auto yp = sphfield::nn::forward(params, xp);
        const auto ym = sphfield::nn::forward(params, xm);
        for (int j = 0; j < 2; ++j)
          lap_fd[j] += (yp[j] - 2.0 * y0[j] + ym[j]) / (h2 * h2);
      }
      for (int j = 0; j < 2; ++j)
        if (std::abs(lap_fd[j] - d.laplacian[j]) >
            1e-5 * std::max(1.0, std::abs(lap_fd[j])))
          lap_ok = false;
    }
    check(grad_ok, "network gradient vs finite differences", failures);
    check(lap_ok, "network laplacian vs finite differences", failures);
  }

  if (failures > 0) {
    std::cout << failures << " check(s) failed\n";
    return kExitNumerical;
  }
  std::cout << "all checks passed\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sound-field estimation around a rigid sphere"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string method;
  std::string measurements_path;
  std::string points_path;
  std::string checkpoint_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON config file");
    sub->add_option("--seed", common.seed, "override config seed");
    sub->add_option("--out", common.out_dir, "override output directory");
  };

  auto* sim = app.add_subcommand("simulate", "write noisy normalized measurements");
  add_common(sim);

  auto* tr = app.add_subcommand("train", "train the network, write checkpoint and loss log");
  add_common(tr);
  tr->add_option("--epochs", common.epochs, "override training epochs");
  tr->add_option("--measurements", measurements_path, "measurements CSV (default: simulate in process)");

  auto* est = app.add_subcommand("estimate", "evaluate one estimator over points");
  add_common(est);
  est->add_option("--method", method, "sh | pl | pinn")->required();
  est->add_option("--measurements", measurements_path, "measurements CSV");
  est->add_option("--points", points_path, "points CSV (default: slice grid)");
  est->add_option("--checkpoint", checkpoint_path, "checkpoint for pinn");

  auto* sw = app.add_subcommand("sweep", "NMSE of all estimators per radius");
  add_common(sw);
  sw->add_option("--epochs", common.epochs, "override training epochs");
  sw->add_option("--checkpoint", checkpoint_path, "reuse a trained checkpoint");

  auto* sl = app.add_subcommand("slice", "field slice at the configured radius");
  add_common(sl);
  sl->add_option("--method", method, "sh | pl | pinn | truth")->required();
  sl->add_option("--checkpoint", checkpoint_path, "checkpoint for pinn");

  app.add_subcommand("verify", "run special-function and autodiff property suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(common);
    if (tr->parsed()) return cmd_train(common, measurements_path);
    if (est->parsed())
      return cmd_estimate(common, method, measurements_path, points_path,
                          checkpoint_path);
    if (sw->parsed()) return cmd_sweep(common, checkpoint_path);
    if (sl->parsed()) return cmd_slice(common, method, checkpoint_path);
    return cmd_verify();
  } catch (const sphfield::config::ConfigError& e) {
    std::cerr << "config error at " << e.what() << "\n";
    return kExitConfig;
  } catch (const sphfield::csv::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
