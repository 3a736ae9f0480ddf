#include "sphfield/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sphfield/geom.hpp"

namespace sphfield::config {

namespace {

using nlohmann::json;

double require_finite(double v, const std::string& path) {
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path, std::string("bad type: ") + e.what());
  }
}

}  // namespace

RunConfig::RunConfig() {
  scene.a = 0.042;
  scene.c = 343.0;
  scene.f = 1000.0;
  scene.sources = {{{2.5, 0.8, 0.0}, {1.0, 0.0}}, {{-2.0, -0.6, 1.2}, {1.0, 0.0}}};
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }

  RunConfig cfg;
  if (j.contains("scene")) {
    const json& s = j.at("scene");
    cfg.scene.a = get_or(s, "radius_m", cfg.scene.a, "scene.radius_m");
    cfg.scene.c = get_or(s, "sound_speed_mps", cfg.scene.c, "scene.sound_speed_mps");
    cfg.scene.f = get_or(s, "frequency_hz", cfg.scene.f, "scene.frequency_hz");
    if (s.contains("sources")) {
      cfg.scene.sources.clear();
      int idx = 0;
      for (const json& src : s.at("sources")) {
        const std::string path = "scene.sources[" + std::to_string(idx) + "]";
        auto pos = src.contains("position_m")
                       ? src.at("position_m").get<std::vector<double>>()
                       : throw ConfigError(path, "missing position_m");
        if (pos.size() != 3)
          throw ConfigError(path + ".position_m", "must have 3 components");
        std::vector<double> amp = {1.0, 0.0};
        if (src.contains("amplitude"))
          amp = src.at("amplitude").get<std::vector<double>>();
        if (amp.size() != 2)
          throw ConfigError(path + ".amplitude", "must be [re, im]");
        cfg.scene.sources.push_back(
            {{pos[0], pos[1], pos[2]}, {amp[0], amp[1]}});
        ++idx;
      }
    }
  }

  if (j.contains("array")) {
    cfg.array_layout =
        get_or<std::string>(j.at("array"), "layout", cfg.array_layout, "array.layout");
  }
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    if (n.contains("snr_db") && n.at("snr_db").is_null())
      cfg.snr_db.reset();
    else if (n.contains("snr_db"))
      cfg.snr_db = get_or(n, "snr_db", 30.0, "noise.snr_db");
  }
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed, "seed");

  if (j.contains("sh"))
    cfg.sh.order = get_or(j.at("sh"), "order", cfg.sh.order, "sh.order");

  if (j.contains("pw")) {
    const json& p = j.at("pw");
    cfg.pw.steering_order =
        get_or(p, "steering_order", cfg.pw.steering_order, "pw.steering_order");
    cfg.pw.reg_rel = get_or(p, "reg_rel", cfg.pw.reg_rel, "pw.reg_rel");
  }

  if (j.contains("nn")) {
    const json& n = j.at("nn");
    cfg.train.arch.hidden_layers =
        get_or(n, "hidden_layers", cfg.train.arch.hidden_layers, "nn.hidden_layers");
    cfg.train.arch.hidden_width =
        get_or(n, "hidden_width", cfg.train.arch.hidden_width, "nn.hidden_width");
  }

  if (j.contains("train")) {
    const json& t = j.at("train");
    cfg.train.adam.lr = get_or(t, "lr", cfg.train.adam.lr, "train.lr");
    cfg.train.adam.beta1 = get_or(t, "beta1", cfg.train.adam.beta1, "train.beta1");
    cfg.train.adam.beta2 = get_or(t, "beta2", cfg.train.adam.beta2, "train.beta2");
    cfg.train.adam.eps = get_or(t, "eps", cfg.train.adam.eps, "train.eps");
    cfg.train.epochs = get_or(t, "epochs", cfg.train.epochs, "train.epochs");
    cfg.train.points.pde_count =
        get_or(t, "pde_points", cfg.train.points.pde_count, "train.pde_points");
    cfg.train.points.bc_count =
        get_or(t, "bc_points", cfg.train.points.bc_count, "train.bc_points");
    cfg.train.points.shell_r_max = get_or(t, "shell_r_max_m",
                                          cfg.train.points.shell_r_max,
                                          "train.shell_r_max_m");
    cfg.train.use_inverse_k_coefficient =
        get_or(t, "use_inverse_k_coefficient", cfg.train.use_inverse_k_coefficient,
               "train.use_inverse_k_coefficient");
    if (t.contains("weights") && !t.at("weights").is_null()) {
      auto wv = t.at("weights").get<std::vector<double>>();
      if (wv.size() != 3)
        throw ConfigError("train.weights", "must be [lambda1, lambda2, lambda3]");
      cfg.train.weights = {wv[0], wv[1], wv[2]};
      cfg.train.override_weights = true;
    }
  }

  if (j.contains("eval")) {
    const json& e = j.at("eval");
    if (e.contains("radii_m"))
      cfg.eval.radii = e.at("radii_m").get<std::vector<double>>();
    cfg.eval.points_per_radius = get_or(e, "points_per_radius",
                                        cfg.eval.points_per_radius,
                                        "eval.points_per_radius");
    if (e.contains("slice")) {
      const json& s = e.at("slice");
      cfg.eval.slice.radius =
          get_or(s, "radius_m", cfg.eval.slice.radius, "eval.slice.radius_m");
      cfg.eval.slice.n_theta =
          get_or(s, "n_theta", cfg.eval.slice.n_theta, "eval.slice.n_theta");
      cfg.eval.slice.n_phi =
          get_or(s, "n_phi", cfg.eval.slice.n_phi, "eval.slice.n_phi");
    }
  }

  cfg.out_dir = get_or<std::string>(j, "out_dir", cfg.out_dir, "out_dir");

  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& cfg) {
  if (!(require_finite(cfg.scene.a, "scene.radius_m") > 0.0))
    throw ConfigError("scene.radius_m", "must be > 0");
  if (!(require_finite(cfg.scene.c, "scene.sound_speed_mps") > 0.0))
    throw ConfigError("scene.sound_speed_mps", "must be > 0");
  if (!(require_finite(cfg.scene.f, "scene.frequency_hz") > 0.0))
    throw ConfigError("scene.frequency_hz", "must be > 0");
  int idx = 0;
  for (const auto& src : cfg.scene.sources) {
    const std::string path = "scene.sources[" + std::to_string(idx) + "]";
    if (geom::norm(src.position) <= cfg.scene.a)
      throw ConfigError(path + ".position_m", "source must lie outside the sphere");
    ++idx;
  }
  if (cfg.array_layout != "pentakis32")
    throw ConfigError("array.layout", "unknown layout '" + cfg.array_layout + "'");
  if (cfg.snr_db && !std::isfinite(*cfg.snr_db))
    throw ConfigError("noise.snr_db", "must be finite or null");
  if (cfg.sh.order < 0 || cfg.sh.order > specfun::kMaxOrder)
    throw ConfigError("sh.order", "must be in [0, 60]");

  const double ka = cfg.scene.wavenumber() * cfg.scene.a;
  if (cfg.pw.steering_order < static_cast<int>(std::ceil(ka)) + 2)
    throw ConfigError("pw.steering_order", "must be >= ceil(k a) + 2");
  if (cfg.pw.steering_order > specfun::kMaxOrder)
    throw ConfigError("pw.steering_order", "must be <= 60");
  if (cfg.pw.reg_rel < 0.0) throw ConfigError("pw.reg_rel", "must be >= 0");

  if (cfg.train.arch.hidden_layers < 1)
    throw ConfigError("nn.hidden_layers", "must be >= 1");
  if (cfg.train.arch.hidden_width < 1)
    throw ConfigError("nn.hidden_width", "must be >= 1");
  if (cfg.train.adam.lr <= 0.0) throw ConfigError("train.lr", "must be > 0");
  if (cfg.train.epochs < 1) throw ConfigError("train.epochs", "must be >= 1");
  if (cfg.train.points.pde_count < 0)
    throw ConfigError("train.pde_points", "must be >= 0");
  if (cfg.train.points.bc_count < 0)
    throw ConfigError("train.bc_points", "must be >= 0");
  if (cfg.train.points.shell_r_max < cfg.scene.a)
    throw ConfigError("train.shell_r_max_m", "must be >= scene.radius_m");
  if (cfg.train.override_weights) {
    if (cfg.train.weights.lambda1 < 0.0 || cfg.train.weights.lambda2 < 0.0 ||
        cfg.train.weights.lambda3 < 0.0)
      throw ConfigError("train.weights", "weights must be >= 0");
  }

  if (cfg.eval.radii.empty()) throw ConfigError("eval.radii_m", "must be non-empty");
  for (double r : cfg.eval.radii)
    if (r < cfg.scene.a - 1e-12)
      throw ConfigError("eval.radii_m", "radius below scene.radius_m");
  if (cfg.eval.points_per_radius < 1)
    throw ConfigError("eval.points_per_radius", "must be >= 1");
  if (cfg.eval.slice.radius < cfg.scene.a)
    throw ConfigError("eval.slice.radius_m", "must be >= scene.radius_m");
  if (cfg.eval.slice.n_theta < 2 || cfg.eval.slice.n_phi < 2)
    throw ConfigError("eval.slice", "grid dims must be >= 2");
}

}  // namespace sphfield::config
