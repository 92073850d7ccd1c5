#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "arissar/aris_opt.hpp"
#include "arissar/channel.hpp"
#include "arissar/geometry.hpp"
#include "arissar/imaging.hpp"

namespace arissar {

struct RadarConfig {
  double carrier_frequency_hz = 6e9;
  double bandwidth_hz = 300e6;
  double pulse_duration_s = 1e-6;
  double prf_hz = 720.0;
  std::size_t slots = 512;
  std::size_t samples = 1024;
  double transmit_power_w = 85.0;
  long gate_samples = -1;  // -1 selects the automatic gate
  bool operator==(const RadarConfig&) const = default;
};

struct GeometryConfig {
  double standoff_m = 300.0;
  double initial_distance_m = 5.0;
  double height_m = 20.0;
  double speed_mps = 30.0;
  std::size_t cells_azimuth = 32;
  std::size_t cells_range = 32;
  double spacing_azimuth_m = 0.5;
  double spacing_range_m = 0.9375;
  bool operator==(const GeometryConfig&) const = default;
};

struct ChannelConfig {
  std::size_t elements = 32;
  double rician_factor_db = 3.0;
  double exponent_sr = 2.2;
  double exponent_rt = 2.2;
  double reference_gain_db = -30.0;
  double noise_power_dbm = -80.0;
  double aris_noise_in_dbm = -80.0;
  double aris_noise_out_dbm = -80.0;
  bool operator==(const ChannelConfig&) const = default;
};

struct OptimizerConfig {
  double power_budget_w = 15.0;
  double a_max = 20.0;
  int max_outer = 100;
  int inner_steps = 1;
  double tolerance = 1e-6;
  int max_damping = 10;
  double init_power_fraction = 0.9;
  bool operator==(const OptimizerConfig&) const = default;
};

struct SceneConfig {
  std::string source = "house";
  std::string path;
  double amplitude = 1.0;
  bool operator==(const SceneConfig&) const = default;
};

struct ImagingConfig {
  int rcmc_taps = 8;
  bool fractional_delay = true;
  bool operator==(const ImagingConfig&) const = default;
};

struct EchoConfig {
  bool once_noise = true;
  double aperture_time_s = 0.0;
  bool operator==(const EchoConfig&) const = default;
};

struct SweepConfig {
  std::vector<std::size_t> elements{8, 16, 32, 64};
  std::vector<double> transmit_powers_w{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000};
  std::vector<double> a_max_values{5, 20};
  std::vector<double> speeds_mps{30, 60, 90, 120};
  std::size_t seeds = 20;
  std::size_t image_seeds = 5;
  std::size_t slot_stride = 8;
  bool operator==(const SweepConfig&) const = default;
};

struct RunConfig {
  RadarConfig radar;
  GeometryConfig geometry;
  ChannelConfig channel;
  OptimizerConfig optimizer;
  SceneConfig scene;
  ImagingConfig imaging;
  EchoConfig echo;
  SweepConfig sweep;
  std::string experiment = "snr-vs-time";
  std::string scheme = "aris";  // aris | pris | random
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool noise = true;
  std::string source_text;  // verbatim input, empty for defaults

  bool operator==(const RunConfig& o) const;
};

/// Carries every problem found, one per line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::vector<std::string> problems)
      : std::runtime_error(what), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Empty or whitespace-only text yields the defaults. Throws ConfigError
/// on syntax errors (with line and column), unknown keys, type mismatches
/// and constraint violations, listing all of them.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Lists violated constraints; empty when valid.
std::vector<std::string> validate_config(const RunConfig& config);

/// Canonical JSON with every field present.
std::string serialize_config(const RunConfig& config);

/// FNV-1a 64 of the canonical JSON with run-local fields (threads,
/// output_dir, verbatim text) excluded.
std::uint64_t params_hash(const RunConfig& config);

RadarParams to_radar_params(const RunConfig& config);  // gate left at 0
GeometrySetup to_geometry_setup(const RunConfig& config);
ChannelParams to_channel_params(const RunConfig& config);
OptimizerOptions to_optimizer_options(const RunConfig& config);
ImagingOptions to_imaging_options(const RunConfig& config);

}  // namespace arissar
