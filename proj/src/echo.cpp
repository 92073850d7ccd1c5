#include "arissar/echo.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "arissar/parallel.hpp"
#include "arissar/waveform.hpp"

namespace arissar {

std::size_t Scene::nonzero() const {
  std::size_t count = 0;
  for (double g : reflectivity.values())
    if (g != 0.0) ++count;
  return count;
}

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::kRaw: return "raw";
    case Stage::kRangeCompressed: return "range_compressed";
    case Stage::kDelayRemoved: return "delay_removed";
    case Stage::kAzimuthFreq: return "azimuth_freq";
    case Stage::kRcmcDone: return "rcmc_done";
    case Stage::kImage: return "image";
  }
  return "unknown";
}

void EchoMatrix::require(Stage expected) const {
  if (stage != expected)
    throw std::logic_error(std::string("echo stage is ") + stage_name(stage) + ", expected " +
                           stage_name(expected));
}

bool ReflectionVector::within_cap(double rel_tol) const {
  for (Eigen::Index m = 0; m < phi.size(); ++m)
    if (std::abs(phi(m)) > a_max * (1.0 + rel_tol)) return false;
  return true;
}

EchoMatrix synthesize_echo(const Scene& scene, const ScenarioGeometry& geom,
                           const std::vector<ChannelSlot>& channels, const std::vector<CVector>& phis,
                           const RadarParams& params, const NoisePowers& noise, const EchoOptions& options) {
  params.validate();
  const std::size_t n_slots = params.slots;
  if (channels.size() != n_slots || phis.size() != n_slots)
    throw std::invalid_argument("per-slot channels and reflection vectors must have N entries");
  if (scene.reflectivity.rows() != geom.cells_azimuth || scene.reflectivity.cols() != geom.cells_range)
    throw std::invalid_argument("scene dimensions do not match the imaging grid");
  if (scene.reflectivity.empty()) throw std::invalid_argument("scene is empty");
  check_receive_window(params, geom);

  const std::size_t q_len = params.samples;
  const double dtau = params.fast_interval();
  const double dt = params.slow_interval();
  const double half_aperture =
      0.5 * (options.aperture_time > 0.0 ? options.aperture_time : static_cast<double>(n_slots) * dt);
  const double half_pulse = 0.5 * static_cast<double>(params.pulse_samples()) * dtau;
  const double amp = params.amplitude();
  const double kr = params.chirp_rate();
  const double f0 = params.carrier_frequency;

  struct Cell {
    std::size_t i, j;
    double g;
  };
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < geom.cells_azimuth; ++i)
    for (std::size_t j = 0; j < geom.cells_range; ++j)
      if (scene.reflectivity(i, j) != 0.0) cells.push_back({i, j, scene.reflectivity(i, j)});

  EchoMatrix out;
  out.data = CMatrix(n_slots, q_len);
  out.stage = Stage::kRaw;
  out.meta.seed = options.seed;
  out.meta.params_hash = options.params_hash;

  parallel_for(n_slots, options.threads, [&](std::size_t n) {
    const ChannelSlot& ch = channels[n];
    const cd s = cascade_gain(phis[n], ch.h_sr, ch.h_rt);
    const cd hn = s * s;
    const Vec3 aris = aris_position(geom, n);
    const double rsr = distance(geom.radar_pos, aris);
    const double slow_time = static_cast<double>(n) * dt;
    std::span<cd> row = out.data.row(n);
    double active_weight = 0.0;

    for (const Cell& c : cells) {
      const Vec3 p = geom.cell_position(c.i, c.j);
      if (std::abs(slow_time - zero_doppler_time(geom, p)) > half_aperture) continue;
      active_weight += c.g;
      const double rrt = distance(aris, p);
      const double gain = ch.cell_gain(rrt);
      const cd coeff = c.g * hn * gain * gain * amp;
      const double tau = 2.0 * (rsr + rrt) / kSpeedOfLight;
      const long first = static_cast<long>(std::ceil((tau - half_pulse) / dtau)) - params.gate_samples;
      const long last = static_cast<long>(std::floor((tau + half_pulse) / dtau)) - params.gate_samples;
      for (long q = std::max(0L, first); q <= std::min(last, static_cast<long>(q_len) - 1); ++q) {
        const double r = static_cast<double>(q + params.gate_samples) * dtau - tau;
        if (r < -half_pulse || r >= half_pulse) continue;
        const double cycles = f0 * r + 0.5 * kr * r * r;
        const double frac = cycles - std::floor(cycles);
        row[static_cast<std::size_t>(q)] += coeff * std::polar(1.0, 2.0 * kPi * frac);
      }
    }

    if (!options.noise) return;
    RngStream rng(options.seed, StreamKind::kEchoNoise, n);
    const double once_norm2 = std::norm(s) * (phis[n].array() * ch.h_rt.array()).abs2().sum();
    const double twice_norm2 = (phis[n].array() * ch.h_sr.array()).abs2().sum();
    const double once_var = options.once_noise ? noise.aris_in * once_norm2 : 0.0;
    const double twice_var = noise.aris_out * twice_norm2;
    for (std::size_t q = 0; q < q_len; ++q) {
      const cd z0 = rng.complex_gaussian(once_var);
      const cd z1 = rng.complex_gaussian(twice_var);
      const cd z = rng.complex_gaussian(noise.thermal);
      row[q] += active_weight * z0 + z1 + z;
    }
  });
  return out;
}

EchoMatrix downconvert(EchoMatrix raw, const RadarParams& params) {
  raw.require(Stage::kRaw);
  if (raw.meta.downconverted) throw std::logic_error("echo is already down-converted");
  const double step = params.carrier_frequency * params.fast_interval();
  for (std::size_t q = 0; q < raw.samples(); ++q) {
    const double cycles = step * static_cast<double>(static_cast<long>(q) + params.gate_samples);
    const cd rot = std::polar(1.0, -2.0 * kPi * (cycles - std::floor(cycles)));
    for (std::size_t n = 0; n < raw.slots(); ++n) raw.data(n, q) *= rot;
  }
  raw.meta.downconverted = true;
  return raw;
}

void write_raw_dump(const std::filesystem::path& path, const EchoMatrix& echo) {
  static_assert(std::endian::native == std::endian::little, "raw dumps assume a little-endian host");
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + path.string());
  std::vector<float> buf;
  buf.reserve(2 * echo.data.size());
  for (const cd& v : echo.data.values()) {
    buf.push_back(static_cast<float>(v.real()));
    buf.push_back(static_cast<float>(v.imag()));
  }
  bin.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!bin) throw std::runtime_error("write failed: " + path.string());

  nlohmann::ordered_json side;
  side["format"] = "complex64-le";
  side["rows"] = echo.slots();
  side["cols"] = echo.samples();
  side["stage"] = stage_name(echo.stage);
  side["downconverted"] = echo.meta.downconverted;
  side["seed"] = echo.meta.seed;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(echo.meta.params_hash));
  side["params_hash"] = hash;
  std::ofstream js(path.string() + ".json");
  js << side.dump(2) << '\n';
  if (!js) throw std::runtime_error("write failed: " + path.string() + ".json");
}

}  // namespace arissar
