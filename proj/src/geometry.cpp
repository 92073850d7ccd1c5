#include "arissar/geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace arissar {

long RadarParams::pulse_samples() const {
  return std::lround(pulse_duration * bandwidth);
}

void RadarParams::validate() const {
  auto require = [](bool ok, const char* field) {
    if (!ok) throw std::invalid_argument(std::string("radar.") + field + " must be positive");
  };
  require(carrier_frequency > 0.0, "carrier_frequency");
  require(bandwidth > 0.0, "bandwidth");
  require(pulse_duration > 0.0, "pulse_duration");
  require(prf > 0.0, "prf");
  require(slots > 0, "slots");
  require(samples > 0, "samples");
  require(transmit_power > 0.0, "transmit_power");
  if (gate_samples < 0) throw std::invalid_argument("radar.gate_samples must be non-negative");
  if (pulse_samples() < 1) throw std::invalid_argument("radar.pulse_duration shorter than one sample");
}

Vec3 ScenarioGeometry::grid_center() const {
  const double half_az = 0.5 * static_cast<double>(cells_azimuth - 1) * spacing_azimuth;
  const double half_rg = 0.5 * static_cast<double>(cells_range - 1) * spacing_range;
  return grid_origin + Vec3{half_az, half_rg, 0.0};
}

ScenarioGeometry make_geometry(const GeometrySetup& setup, const RadarParams& params) {
  if (setup.standoff <= setup.height)
    throw std::invalid_argument("geometry.standoff must exceed geometry.height");
  if (setup.speed <= 0.0) throw std::invalid_argument("geometry.speed must be positive");
  if (setup.initial_distance <= 0.0)
    throw std::invalid_argument("geometry.initial_distance must be positive");
  if (setup.cells_azimuth == 0 || setup.cells_range == 0)
    throw std::invalid_argument("geometry grid must have at least one cell");

  ScenarioGeometry g;
  g.radar_pos = {0.0, 0.0, setup.height};
  g.uav_start = {setup.initial_distance, 0.0, setup.height};
  g.speed = setup.speed;
  g.uav_height = setup.height;
  g.spacing_azimuth = setup.spacing_azimuth;
  g.spacing_range = setup.spacing_range;
  g.cells_azimuth = setup.cells_azimuth;
  g.cells_range = setup.cells_range;
  g.slow_interval = params.slow_interval();
  g.slots = params.slots;

  const double mid_time = 0.5 * static_cast<double>(params.slots) * g.slow_interval;
  const Vec3 center{g.uav_start.x + g.speed * mid_time,
                    std::sqrt(setup.standoff * setup.standoff - setup.height * setup.height), 0.0};
  const double half_az = 0.5 * static_cast<double>(g.cells_azimuth - 1) * g.spacing_azimuth;
  const double half_rg = 0.5 * static_cast<double>(g.cells_range - 1) * g.spacing_range;
  g.grid_origin = center - Vec3{half_az, half_rg, 0.0};
  return g;
}

Vec3 aris_position(const ScenarioGeometry& geom, std::size_t n) {
  if (n >= geom.slots) throw std::out_of_range("slot index out of range");
  const double t = static_cast<double>(n) * geom.slow_interval;
  return geom.uav_start + Vec3{geom.speed * t, 0.0, 0.0};
}

double closest_range(const ScenarioGeometry& geom, Vec3 point) {
  const double dy = point.y - geom.uav_start.y;
  const double dz = point.z - geom.uav_start.z;
  const double r0 = std::sqrt(dy * dy + dz * dz);
  if (r0 < 1e-9) throw std::invalid_argument("degenerate geometry: track passes through a grid point");
  return r0;
}

double zero_doppler_time(const ScenarioGeometry& geom, Vec3 point) {
  return (point.x - geom.uav_start.x) / geom.speed;
}

double reference_range(const ScenarioGeometry& geom) {
  return closest_range(geom, geom.grid_center());
}

SlotGeometry slot_geometry(const ScenarioGeometry& geom, std::size_t n) {
  const Vec3 aris = aris_position(geom, n);
  SlotGeometry s;
  s.n = n;
  s.relay_distance = distance(geom.radar_pos, aris);
  s.reference_range = reference_range(geom);
  const std::size_t na = geom.cells_azimuth;
  const std::size_t nr = geom.cells_range;
  s.target_distance = RMatrix(na, nr);
  s.total_distance = RMatrix(na, nr);
  s.closest_range = RMatrix(na, nr);
  s.zero_doppler_time = RMatrix(na, nr);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nr; ++j) {
      const Vec3 p = geom.cell_position(i, j);
      const double rt = distance(aris, p);
      s.target_distance(i, j) = rt;
      s.total_distance(i, j) = s.relay_distance + rt;
      s.closest_range(i, j) = closest_range(geom, p);
      s.zero_doppler_time(i, j) = zero_doppler_time(geom, p);
    }
  }
  return s;
}

DelayBounds scene_delay_bounds(const ScenarioGeometry& geom) {
  DelayBounds b;
  b.min_target_distance = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < geom.slots; ++n) {
    const Vec3 aris = aris_position(geom, n);
    const double rsr = distance(geom.radar_pos, aris);
    b.max_relay_distance = std::max(b.max_relay_distance, rsr);
    // Extremes of a convex function over the grid rectangle sit at corners
    // unless the track projection falls inside; checking corners plus the
    // nearest grid point covers both.
    const Vec3 c0 = geom.cell_position(0, 0);
    const Vec3 c1 = geom.cell_position(geom.cells_azimuth - 1, geom.cells_range - 1);
    for (double x : {c0.x, c1.x}) {
      for (double y : {c0.y, c1.y}) {
        const double rt = distance(aris, Vec3{x, y, 0.0});
        b.max_total_distance = std::max(b.max_total_distance, rsr + rt);
      }
    }
    const Vec3 nearest{std::clamp(aris.x, c0.x, c1.x), std::clamp(aris.y, c0.y, c1.y), 0.0};
    b.min_target_distance = std::min(b.min_target_distance, distance(aris, nearest));
  }
  return b;
}

long auto_gate_samples(const RadarParams& params, const ScenarioGeometry& geom, long margin) {
  const DelayBounds b = scene_delay_bounds(geom);
  const double earliest = 2.0 * b.min_target_distance / (kSpeedOfLight * params.fast_interval());
  const long gate = static_cast<long>(std::floor(earliest)) - params.pulse_samples() / 2 - margin;
  return std::max(0L, gate);
}

void check_receive_window(const RadarParams& params, const ScenarioGeometry& geom) {
  const DelayBounds b = scene_delay_bounds(geom);
  const double to_samples = 2.0 / (kSpeedOfLight * params.fast_interval());
  const double first = b.min_target_distance * to_samples - params.pulse_samples() / 2;
  const double last = b.max_total_distance * to_samples + params.pulse_samples() / 2;
  const double window_end = static_cast<double>(params.gate_samples + static_cast<long>(params.samples));
  if (first < static_cast<double>(params.gate_samples))
    throw std::invalid_argument("radar.gate_samples opens the receive window after the earliest echo");
  if (last > window_end)
    throw std::invalid_argument(
        "radar.samples too small: scene delay span exceeds the receive window (need " +
        std::to_string(static_cast<long>(std::ceil(last)) - params.gate_samples) + " samples)");
}

}  // namespace arissar
