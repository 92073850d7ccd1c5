#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "arissar/channel.hpp"
#include "arissar/core.hpp"
#include "arissar/geometry.hpp"

namespace arissar {

/// Ground-truth reflectivity g(i, j) on the imaging grid (Na x Nr).
struct Scene {
  RMatrix reflectivity;
  std::string name;

  std::size_t nonzero() const;
};

enum class Stage { kRaw, kRangeCompressed, kDelayRemoved, kAzimuthFreq, kRcmcDone, kImage };

const char* stage_name(Stage stage);

struct EchoMeta {
  std::uint64_t seed = 0;
  std::uint64_t params_hash = 0;
  bool downconverted = false;
  std::size_t rcmc_fallbacks = 0;  // samples resolved by nearest neighbour
};

/// N x Q complex data (row n = slow-time slot, column q = fast-time sample).
struct EchoMatrix {
  CMatrix data;
  Stage stage = Stage::kRaw;
  EchoMeta meta;

  std::size_t slots() const { return data.rows(); }
  std::size_t samples() const { return data.cols(); }
  /// Throws std::logic_error unless the data is at `expected`.
  void require(Stage expected) const;
};

/// Per-slot ARIS coefficients with their amplitude cap and power budget.
struct ReflectionVector {
  CVector phi;
  double a_max = 20.0;
  double power_budget = 15.0;

  bool within_cap(double rel_tol = 1e-9) const;
};

struct NoisePowers {
  double thermal = 0.0;   // sigma^2
  double aris_in = 0.0;   // sigma0^2
  double aris_out = 0.0;  // sigma1^2
};

struct EchoOptions {
  bool noise = true;
  bool once_noise = true;       // ARIS input-noise term weighted by the scene
  double aperture_time = 0.0;   // T_a in s; 0 selects N * delta_t
  std::size_t threads = 1;
  std::uint64_t seed = 1;
  std::uint64_t params_hash = 0;
};

/// Raw received matrix. Each cell contributes its analytic transmitted
/// waveform evaluated at the exact two-way delay 2(R_sr + R_rt)/c; the
/// per-cell cascade is h_n scaled by the cell's path-loss ratio squared.
/// Throws std::invalid_argument when the receive window cannot hold the scene.
EchoMatrix synthesize_echo(const Scene& scene, const ScenarioGeometry& geom,
                           const std::vector<ChannelSlot>& channels, const std::vector<CVector>& phis,
                           const RadarParams& params, const NoisePowers& noise, const EchoOptions& options);

/// Removes the carrier exp{j*2*pi*f0*q_abs*delta_tau} from a raw matrix.
EchoMatrix downconvert(EchoMatrix raw, const RadarParams& params);

/// Little-endian complex64, row-major, plus `<path>.json` with dims, stage,
/// seed and params hash.
void write_raw_dump(const std::filesystem::path& path, const EchoMatrix& echo);

}  // namespace arissar
