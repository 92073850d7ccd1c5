#pragma once

#include <cstddef>

#include "arissar/core.hpp"

namespace arissar {

/// Waveform and timing constants. Fast time is critically sampled
/// (delta_tau = 1/B); sample q of the receive window sits at absolute
/// fast-time index gate_samples + q.
struct RadarParams {
  double carrier_frequency = 6e9;   // f0, Hz
  double bandwidth = 300e6;         // B, Hz
  double pulse_duration = 1e-6;     // T_p, s
  double prf = 720.0;               // Hz
  std::size_t slots = 512;          // N, slow-time slots
  std::size_t samples = 1024;       // Q, fast-time samples
  double transmit_power = 85.0;     // P_s, W
  long gate_samples = 0;            // receive-window start, absolute samples

  double amplitude() const { return std::sqrt(transmit_power); }  // A0
  double chirp_rate() const { return bandwidth / pulse_duration; }
  double fast_interval() const { return 1.0 / bandwidth; }
  double slow_interval() const { return 1.0 / prf; }
  double wavelength() const { return kSpeedOfLight / carrier_frequency; }
  /// Number of fast-time samples covered by the pulse envelope.
  long pulse_samples() const;

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;
};

/// Straight-line UAV track along +x at constant height; the imaging grid
/// lies on z = 0 with azimuth index i along x and range index j along y.
struct ScenarioGeometry {
  Vec3 radar_pos;
  Vec3 uav_start;
  double speed = 30.0;
  double uav_height = 20.0;
  Vec3 grid_origin;               // centre of cell (0, 0)
  double spacing_azimuth = 0.5;   // m
  double spacing_range = 0.9375;  // m
  std::size_t cells_azimuth = 32;  // Na
  std::size_t cells_range = 32;    // Nr
  double slow_interval = 1.0 / 720.0;
  std::size_t slots = 512;

  Vec3 cell_position(std::size_t i, std::size_t j) const {
    return grid_origin + Vec3{static_cast<double>(i) * spacing_azimuth,
                              static_cast<double>(j) * spacing_range, 0.0};
  }
  Vec3 grid_center() const;
};

struct GeometrySetup {
  double standoff = 300.0;          // closest ARIS to grid-centre distance
  double initial_distance = 5.0;    // radar to ARIS at slot 0
  double height = 20.0;
  double speed = 30.0;
  std::size_t cells_azimuth = 32;
  std::size_t cells_range = 32;
  double spacing_azimuth = 0.5;
  double spacing_range = 0.9375;
};

/// Radar sits at (0, 0, height), the UAV starts initial_distance further
/// along track, and the grid centre is reached at mid-record.
ScenarioGeometry make_geometry(const GeometrySetup& setup, const RadarParams& params);

/// Per-cell range history quantities for slot n.
struct SlotGeometry {
  std::size_t n = 0;
  double relay_distance = 0.0;  // R_sr
  RMatrix target_distance;      // R_rt (Na x Nr)
  RMatrix total_distance;       // R_sr + R_rt
  RMatrix closest_range;        // R0
  RMatrix zero_doppler_time;    // t_zero, s
  double reference_range = 0.0;  // scene-centre closest slant range
};

Vec3 aris_position(const ScenarioGeometry& geom, std::size_t n);
SlotGeometry slot_geometry(const ScenarioGeometry& geom, std::size_t n);

/// Closest-approach slant range of a point to the track. Throws when the
/// track passes through the point.
double closest_range(const ScenarioGeometry& geom, Vec3 point);
/// Continuous slow time at which the ARIS is closest to the point.
double zero_doppler_time(const ScenarioGeometry& geom, Vec3 point);
double reference_range(const ScenarioGeometry& geom);

struct DelayBounds {
  double min_target_distance = 0.0;  // min over slots and cells of R_rt
  double max_total_distance = 0.0;   // max over slots and cells of R_sr + R_rt
  double max_relay_distance = 0.0;
};
DelayBounds scene_delay_bounds(const ScenarioGeometry& geom);

/// Gate start that leaves `margin` samples ahead of the earliest
/// relay-compensated echo, including the leading half of the pulse.
long auto_gate_samples(const RadarParams& params, const ScenarioGeometry& geom, long margin = 16);

/// Throws std::invalid_argument when the receive window cannot hold the
/// full two-way delay span of the scene.
void check_receive_window(const RadarParams& params, const ScenarioGeometry& geom);

}  // namespace arissar
