#include "arissar/config.hpp"

#include <fstream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include "arissar/artifacts.hpp"

namespace arissar {
namespace {

using json = nlohmann::ordered_json;

// Calls v(section, key, field) for every configurable field; section "" is
// the top level. One table drives parsing, serialisation and key checks.
template <typename Config, typename Visitor>
void visit_fields(Config& c, Visitor&& v) {
  v("radar", "carrier_frequency_hz", c.radar.carrier_frequency_hz);
  v("radar", "bandwidth_hz", c.radar.bandwidth_hz);
  v("radar", "pulse_duration_s", c.radar.pulse_duration_s);
  v("radar", "prf_hz", c.radar.prf_hz);
  v("radar", "slots", c.radar.slots);
  v("radar", "samples", c.radar.samples);
  v("radar", "transmit_power_w", c.radar.transmit_power_w);
  v("radar", "gate_samples", c.radar.gate_samples);

  v("geometry", "standoff_m", c.geometry.standoff_m);
  v("geometry", "initial_distance_m", c.geometry.initial_distance_m);
  v("geometry", "height_m", c.geometry.height_m);
  v("geometry", "speed_mps", c.geometry.speed_mps);
  v("geometry", "cells_azimuth", c.geometry.cells_azimuth);
  v("geometry", "cells_range", c.geometry.cells_range);
  v("geometry", "spacing_azimuth_m", c.geometry.spacing_azimuth_m);
  v("geometry", "spacing_range_m", c.geometry.spacing_range_m);

  v("channel", "elements", c.channel.elements);
  v("channel", "rician_factor_db", c.channel.rician_factor_db);
  v("channel", "exponent_sr", c.channel.exponent_sr);
  v("channel", "exponent_rt", c.channel.exponent_rt);
  v("channel", "reference_gain_db", c.channel.reference_gain_db);
  v("channel", "noise_power_dbm", c.channel.noise_power_dbm);
  v("channel", "aris_noise_in_dbm", c.channel.aris_noise_in_dbm);
  v("channel", "aris_noise_out_dbm", c.channel.aris_noise_out_dbm);

  v("optimizer", "power_budget_w", c.optimizer.power_budget_w);
  v("optimizer", "a_max", c.optimizer.a_max);
  v("optimizer", "max_outer", c.optimizer.max_outer);
  v("optimizer", "inner_steps", c.optimizer.inner_steps);
  v("optimizer", "tolerance", c.optimizer.tolerance);
  v("optimizer", "max_damping", c.optimizer.max_damping);
  v("optimizer", "init_power_fraction", c.optimizer.init_power_fraction);

  v("scene", "source", c.scene.source);
  v("scene", "path", c.scene.path);
  v("scene", "amplitude", c.scene.amplitude);

  v("imaging", "rcmc_taps", c.imaging.rcmc_taps);
  v("imaging", "fractional_delay", c.imaging.fractional_delay);

  v("echo", "once_noise", c.echo.once_noise);
  v("echo", "aperture_time_s", c.echo.aperture_time_s);

  v("sweep", "elements", c.sweep.elements);
  v("sweep", "transmit_powers_w", c.sweep.transmit_powers_w);
  v("sweep", "a_max_values", c.sweep.a_max_values);
  v("sweep", "speeds_mps", c.sweep.speeds_mps);
  v("sweep", "seeds", c.sweep.seeds);
  v("sweep", "image_seeds", c.sweep.image_seeds);
  v("sweep", "slot_stride", c.sweep.slot_stride);

  v("", "experiment", c.experiment);
  v("", "scheme", c.scheme);
  v("", "output_dir", c.output_dir);
  v("", "seed", c.seed);
  v("", "threads", c.threads);
  v("", "noise", c.noise);
}

std::string field_name(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

template <typename T>
bool read_value(const json& j, T& out) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!j.is_boolean()) return false;
    out = j.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!j.is_string()) return false;
    out = j.get<std::string>();
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!j.is_number()) return false;
    out = j.get<T>();
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!j.is_number_unsigned()) return false;
    out = j.get<T>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) return false;
    out = j.get<T>();
  } else {
    if (!j.is_array()) return false;
    T values;
    for (const json& e : j) {
      typename T::value_type v{};
      if (!read_value(e, v)) return false;
      values.push_back(v);
    }
    out = std::move(values);
  }
  return true;
}

template <typename T>
const char* type_label() {
  if constexpr (std::is_same_v<T, bool>) return "a boolean";
  else if constexpr (std::is_same_v<T, std::string>) return "a string";
  else if constexpr (std::is_floating_point_v<T>) return "a number";
  else if constexpr (std::is_unsigned_v<T>) return "a non-negative integer";
  else if constexpr (std::is_integral_v<T>) return "an integer";
  else return "an array";
}

json to_json(const RunConfig& c) {
  json out = json::object();
  RunConfig copy = c;
  visit_fields(copy, [&](const std::string& section, const std::string& key, auto& field) {
    if (section.empty()) {
      out[key] = field;
    } else {
      out[section][key] = field;
    }
  });
  return out;
}

// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

ConfigError config_error(std::vector<std::string> problems) {
  std::string msg = "invalid configuration:";
  for (const auto& p : problems) msg += "\n  " + p;
  return ConfigError(msg, std::move(problems));
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const { return serialize_config(*this) == serialize_config(o); }

std::vector<std::string> validate_config(const RunConfig& c) {
  std::vector<std::string> p;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) p.push_back(std::string(name) + " must be positive");
  };
  positive(c.radar.carrier_frequency_hz, "radar.carrier_frequency_hz");
  positive(c.radar.bandwidth_hz, "radar.bandwidth_hz");
  positive(c.radar.pulse_duration_s, "radar.pulse_duration_s");
  positive(c.radar.prf_hz, "radar.prf_hz");
  positive(c.radar.transmit_power_w, "radar.transmit_power_w");
  if (c.radar.slots < 2) p.push_back("radar.slots must be at least 2");
  if (c.radar.samples < 2) p.push_back("radar.samples must be at least 2");
  if (c.radar.gate_samples < -1) p.push_back("radar.gate_samples must be -1 (auto) or non-negative");
  if (c.radar.pulse_duration_s * c.radar.bandwidth_hz < 1.0)
    p.push_back("radar.pulse_duration_s must cover at least one sample");

  positive(c.geometry.standoff_m, "geometry.standoff_m");
  positive(c.geometry.initial_distance_m, "geometry.initial_distance_m");
  positive(c.geometry.speed_mps, "geometry.speed_mps");
  positive(c.geometry.spacing_azimuth_m, "geometry.spacing_azimuth_m");
  positive(c.geometry.spacing_range_m, "geometry.spacing_range_m");
  if (!(c.geometry.height_m >= 0.0)) p.push_back("geometry.height_m must be non-negative");
  if (!(c.geometry.standoff_m > c.geometry.height_m)) p.push_back("geometry.standoff_m must exceed geometry.height_m");
  if (c.geometry.cells_azimuth == 0) p.push_back("geometry.cells_azimuth must be at least 1");
  if (c.geometry.cells_range == 0) p.push_back("geometry.cells_range must be at least 1");

  if (c.channel.elements == 0) p.push_back("channel.elements must be at least 1");
  if (!(c.channel.exponent_sr > 0.0)) p.push_back("channel.exponent_sr must be positive");
  if (!(c.channel.exponent_rt > 0.0)) p.push_back("channel.exponent_rt must be positive");

  positive(c.optimizer.power_budget_w, "optimizer.power_budget_w");
  positive(c.optimizer.a_max, "optimizer.a_max");
  positive(c.optimizer.tolerance, "optimizer.tolerance");
  if (c.optimizer.max_outer < 1) p.push_back("optimizer.max_outer must be at least 1");
  if (c.optimizer.inner_steps < 1) p.push_back("optimizer.inner_steps must be at least 1");
  if (c.optimizer.max_damping < 0) p.push_back("optimizer.max_damping must be non-negative");
  if (!(c.optimizer.init_power_fraction > 0.0 && c.optimizer.init_power_fraction <= 1.0))
    p.push_back("optimizer.init_power_fraction must lie in (0, 1]");

  static const std::set<std::string> sources{"point", "grid3", "house", "raster"};
  if (!sources.count(c.scene.source)) p.push_back("scene.source must be one of point, grid3, house, raster");
  if (c.scene.source == "raster" && c.scene.path.empty()) p.push_back("scene.path is required for a raster scene");
  positive(c.scene.amplitude, "scene.amplitude");

  if (c.imaging.rcmc_taps < 2) p.push_back("imaging.rcmc_taps must be at least 2");
  if (!(c.echo.aperture_time_s >= 0.0)) p.push_back("echo.aperture_time_s must be non-negative");

  if (c.sweep.elements.empty()) p.push_back("sweep.elements must not be empty");
  for (std::size_t m : c.sweep.elements)
    if (m == 0) p.push_back("sweep.elements entries must be at least 1");
  if (c.sweep.transmit_powers_w.empty()) p.push_back("sweep.transmit_powers_w must not be empty");
  for (double v : c.sweep.transmit_powers_w)
    if (!(v > 0.0)) p.push_back("sweep.transmit_powers_w entries must be positive");
  for (double v : c.sweep.a_max_values)
    if (!(v > 0.0)) p.push_back("sweep.a_max_values entries must be positive");
  if (c.sweep.speeds_mps.empty()) p.push_back("sweep.speeds_mps must not be empty");
  for (double v : c.sweep.speeds_mps)
    if (!(v > 0.0)) p.push_back("sweep.speeds_mps entries must be positive");
  if (c.sweep.seeds == 0) p.push_back("sweep.seeds must be at least 1");
  if (c.sweep.image_seeds == 0) p.push_back("sweep.image_seeds must be at least 1");
  if (c.sweep.slot_stride == 0) p.push_back("sweep.slot_stride must be at least 1");

  static const std::set<std::string> experiments{"snr-vs-time", "snr-vs-elements", "snr-vs-power", "image",
                                                 "velocity-sweep"};
  if (!experiments.count(c.experiment))
    p.push_back("experiment must be one of snr-vs-time, snr-vs-elements, snr-vs-power, image, velocity-sweep");
  if (c.scheme != "aris" && c.scheme != "pris" && c.scheme != "random")
    p.push_back("scheme must be one of aris, pris, random");
  if (c.threads == 0) p.push_back("threads must be at least 1");
  return p;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  cfg.source_text = text;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return cfg;

  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw config_error({"syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                        e.what()});
  }
  if (!doc.is_object()) throw config_error({"top level must be a JSON object"});

  std::vector<std::string> problems;
  std::map<std::string, std::set<std::string>> known;
  visit_fields(cfg, [&](const std::string& section, const std::string& key, auto&) { known[section].insert(key); });

  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    if (known.count(key) && !key.empty()) {
      if (!it.value().is_object()) {
        problems.push_back(key + " must be an object");
        continue;
      }
      for (auto jt = it.value().begin(); jt != it.value().end(); ++jt)
        if (!known[key].count(jt.key())) problems.push_back("unknown key " + key + "." + jt.key());
    } else if (!known[""].count(key)) {
      problems.push_back("unknown key " + key);
    }
  }

  visit_fields(cfg, [&](const std::string& section, const std::string& key, auto& field) {
    const json* node = nullptr;
    if (section.empty()) {
      auto it = doc.find(key);
      if (it != doc.end()) node = &*it;
    } else {
      auto sec = doc.find(section);
      if (sec != doc.end() && sec->is_object()) {
        auto it = sec->find(key);
        if (it != sec->end()) node = &*it;
      }
    }
    if (!node) return;
    using T = std::decay_t<decltype(field)>;
    if (!read_value(*node, field))
      problems.push_back(field_name(section, key) + " must be " + type_label<T>());
  });

  for (auto& v : validate_config(cfg)) problems.push_back(std::move(v));
  if (!problems.empty()) throw config_error(std::move(problems));
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string(), {"cannot read " + path.string()});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) { return to_json(c).dump(2); }

std::uint64_t params_hash(const RunConfig& c) {
  json j = to_json(c);
  j.erase("threads");
  j.erase("output_dir");
  return fnv1a64(j.dump());
}

RadarParams to_radar_params(const RunConfig& c) {
  RadarParams p;
  p.carrier_frequency = c.radar.carrier_frequency_hz;
  p.bandwidth = c.radar.bandwidth_hz;
  p.pulse_duration = c.radar.pulse_duration_s;
  p.prf = c.radar.prf_hz;
  p.slots = c.radar.slots;
  p.samples = c.radar.samples;
  p.transmit_power = c.radar.transmit_power_w;
  p.gate_samples = std::max(0L, c.radar.gate_samples);
  return p;
}

GeometrySetup to_geometry_setup(const RunConfig& c) {
  GeometrySetup g;
  g.standoff = c.geometry.standoff_m;
  g.initial_distance = c.geometry.initial_distance_m;
  g.height = c.geometry.height_m;
  g.speed = c.geometry.speed_mps;
  g.cells_azimuth = c.geometry.cells_azimuth;
  g.cells_range = c.geometry.cells_range;
  g.spacing_azimuth = c.geometry.spacing_azimuth_m;
  g.spacing_range = c.geometry.spacing_range_m;
  return g;
}

ChannelParams to_channel_params(const RunConfig& c) {
  ChannelParams p;
  p.elements = c.channel.elements;
  p.rician_factor = db_to_linear(c.channel.rician_factor_db);
  p.exponent_sr = c.channel.exponent_sr;
  p.exponent_rt = c.channel.exponent_rt;
  p.reference_gain = db_to_linear(c.channel.reference_gain_db);
  p.noise_power = dbm_to_watts(c.channel.noise_power_dbm);
  p.aris_noise_in = dbm_to_watts(c.channel.aris_noise_in_dbm);
  p.aris_noise_out = dbm_to_watts(c.channel.aris_noise_out_dbm);
  p.seed = c.seed;
  return p;
}

OptimizerOptions to_optimizer_options(const RunConfig& c) {
  OptimizerOptions o;
  o.max_outer = c.optimizer.max_outer;
  o.inner_steps = c.optimizer.inner_steps;
  o.tolerance = c.optimizer.tolerance;
  o.max_damping = c.optimizer.max_damping;
  o.init_power_fraction = c.optimizer.init_power_fraction;
  o.seed = c.seed;
  return o;
}

ImagingOptions to_imaging_options(const RunConfig& c) {
  ImagingOptions o;
  o.threads = c.threads;
  o.rcmc_taps = c.imaging.rcmc_taps;
  o.fractional_delay = c.imaging.fractional_delay;
  return o;
}

}  // namespace arissar
