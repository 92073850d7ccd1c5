#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "arissar/aris_opt.hpp"
#include "arissar/config.hpp"
#include "arissar/echo.hpp"
#include "arissar/imaging.hpp"

namespace arissar {

/// Resolved parameters for one run: waveform with its gate, geometry and
/// channel statistics.
struct Scenario {
  RunConfig config;
  RadarParams radar;
  ScenarioGeometry geom;
  ChannelParams channel;
};

/// Validates the config, resolves the automatic gate and checks that the
/// receive window holds the scene.
Scenario make_scenario(const RunConfig& config);

enum class Scheme { kAris, kPris, kRandom };
Scheme parse_scheme(const std::string& name);
const char* scheme_name(Scheme scheme);

struct SlotDesign {
  CVector phi;
  double snr = 0.0;    // linear, under the scheme's own power split
  double power = 0.0;  // ARIS power draw, W (0 for passive schemes)
  std::size_t outer_iterations = 0;
};

std::vector<ChannelSlot> sample_channels(const Scenario& sc, std::size_t threads = 1);

/// ARIS: optimised under (P_s, P_aris, a_max). PRIS: phase alignment with
/// the radar carrying P_s + P_aris. Random: random unit phases, same power.
SlotDesign design_slot(Scheme scheme, const ChannelSlot& slot, const Scenario& sc, double a_max);

struct ImageRun {
  ImageResult image;
  std::vector<SlotDesign> designs;
  double mean_snr_db = 0.0;
};

/// Designs every slot, synthesises the echo (noise per config) and forms
/// the image with metrics against the scene. A non-empty `raw_dump` also
/// writes the raw echo there.
ImageRun run_image(const Scenario& sc, Scheme scheme, double a_max, const Scene& scene, std::size_t threads = 1,
                   const std::filesystem::path& raw_dump = {});

Scene scenario_scene(const Scenario& sc);

/// Slow-time indices visited by the SNR experiments.
std::vector<std::size_t> strided_slots(std::size_t slots, std::size_t stride);

double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct SnrTimeRow {
  std::uint64_t seed = 0;
  std::size_t slot = 0;
  double time_s = 0.0;
  double relay_distance_m = 0.0;
  double aris_db = 0.0;
  double pris_db = 0.0;
  double random_db = 0.0;
};

struct SnrTimeData {
  std::vector<SnrTimeRow> rows;
  std::vector<double> spearman_aris;  // per seed, SNR vs relay distance
  double mean_gain_db = 0.0;          // mean ARIS - PRIS
};

struct SweepPoint {
  std::string label;
  double x = 0.0;  // M, P_s, v or a_max
  std::uint64_t seed = 0;
  std::map<std::string, double> values;  // column -> value
  bool ok = true;
  std::string error;
};

struct SweepData {
  std::vector<std::string> columns;
  std::vector<SweepPoint> points;
  /// Mean over successful seeds of `column` at each distinct x (x ascending).
  std::vector<std::pair<double, double>> mean_by_x(const std::string& column) const;
};

SnrTimeData snr_vs_time(const RunConfig& config, std::vector<std::string>* failures = nullptr);
SweepData snr_vs_elements(const RunConfig& config);
SweepData snr_vs_power(const RunConfig& config);
/// Image experiments write one PGM per point (and a float32 matrix for the
/// first seed) into `image_dir` when it is non-empty.
SweepData image_comparison(const RunConfig& config, const std::filesystem::path& image_dir = {},
                           std::vector<std::string>* files = nullptr);
SweepData velocity_sweep(const RunConfig& config, const std::filesystem::path& image_dir = {},
                         std::vector<std::string>* files = nullptr);

/// Average slope (dB per decade) of y(log10 x) over [x0, x0*10],
/// interpolating linearly in log10 x.
double decade_slope(const std::vector<std::pair<double, double>>& curve, double x0);

struct ExperimentResult {
  std::string name;
  std::filesystem::path directory;
  std::vector<std::string> files;
  std::vector<std::string> failures;
  std::map<std::string, double> summary;
};

/// Runs a named experiment and writes its CSV, images and metadata.json
/// below config.output_dir/<name>.
ExperimentResult run_experiment(const std::string& name, const RunConfig& config);

}  // namespace arissar
