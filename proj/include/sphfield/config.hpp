#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sphfield/field.hpp"
#include "sphfield/train.hpp"

namespace sphfield::config {

// Invalid configuration; `field_path` names the offending entry
// (e.g. "train.epochs").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field_path, const std::string& what)
      : std::runtime_error(field_path + ": " + what), field_path_(field_path) {}

  const std::string& field_path() const { return field_path_; }

 private:
  std::string field_path_;
};

struct ShConfig {
  int order = 4;
};

struct PwConfig {
  int steering_order = 12;
  double reg_rel = 1e-3;
};

struct SliceConfig {
  double radius = 0.072;
  int n_theta = 64;
  int n_phi = 128;
};

struct EvalConfig {
  std::vector<double> radii = {0.042, 0.05, 0.06, 0.072, 0.08, 0.09, 0.1};
  int points_per_radius = 2000;
  SliceConfig slice;
};

// Complete run description. Defaults reproduce the reference experiment:
// 32 mics on an a = 0.042 m rigid sphere, two unit point sources, 1 kHz,
// 30 dB SNR, a 3x4 tanh network trained with Adam for 10,000 epochs.
struct RunConfig {
  field::ScatteringScene scene;
  std::string array_layout = "pentakis32";
  std::optional<double> snr_db = 30.0;
  std::uint64_t seed = 1;
  ShConfig sh;
  PwConfig pw;
  train::TrainConfig train;
  EvalConfig eval;
  std::string out_dir = "out";

  RunConfig();
};

// Parses JSON text; missing keys keep their defaults. Throws ConfigError on
// unknown layout names, bad types, or values that violate preconditions.
RunConfig parse_config(const std::string& json_text);

RunConfig load_config(const std::string& path);

// Re-validates every cross-field precondition; parse_config calls this.
void validate(const RunConfig& cfg);

}  // namespace sphfield::config
