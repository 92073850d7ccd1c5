// Command-line front end: simulate, optimize, sweep, experiment <name>.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "arissar/artifacts.hpp"
#include "arissar/config.hpp"
#include "arissar/experiments.hpp"
#include "arissar/parallel.hpp"

namespace {

using namespace arissar;
using json = nlohmann::ordered_json;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
  bool no_noise = false;
};

RunConfig resolve_config(const CommonFlags& f) {
  RunConfig cfg = f.config_path.empty() ? parse_config("") : load_config(f.config_path);
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.output_dir = *f.out;
  if (f.threads) cfg.threads = *f.threads;
  if (f.no_noise) cfg.noise = false;
  const auto problems = validate_config(cfg);
  if (!problems.empty()) throw ConfigError("invalid configuration: " + problems.front(), problems);
  return cfg;
}

void report(const ExperimentResult& r) {
  std::cout << r.name << ": " << r.files.size() << " files in " << r.directory.string() << "\n";
  for (const auto& [k, v] : r.summary) std::cout << "  " << k << " = " << v << "\n";
  for (const auto& f : r.failures) std::cout << "  FAILED " << f << "\n";
}

int cmd_simulate(const RunConfig& cfg, bool dump_raw) {
  const Scenario sc = make_scenario(cfg);
  const Scheme scheme = parse_scheme(cfg.scheme);
  const Scene scene = scenario_scene(sc);
  const std::filesystem::path dir = std::filesystem::path(cfg.output_dir) / "simulate";
  std::filesystem::create_directories(dir);
  const ImageRun run =
      run_image(sc, scheme, cfg.optimizer.a_max, scene, cfg.threads, dump_raw ? dir / "raw_echo.c64" : "");
  write_pgm(dir / "image.pgm", run.image.magnitude);
  write_float32(dir / "image.f32", run.image.magnitude);
  write_pgm(dir / "truth.pgm", rasterize_truth(scene, sc.geom, sc.radar));

  const ImageMetrics& m = run.image.metrics;
  json meta;
  meta["scheme"] = cfg.scheme;
  meta["scene"] = scene.name;
  meta["params_hash"] = hex64(params_hash(cfg));
  meta["seed"] = cfg.seed;
  meta["rows"] = run.image.magnitude.rows();
  meta["cols"] = run.image.magnitude.cols();
  meta["gate_samples"] = sc.radar.gate_samples;
  meta["rcmc_fallbacks"] = run.image.focused.meta.rcmc_fallbacks;
  meta["mean_snr_db"] = run.mean_snr_db;
  meta["metrics"] = {{"pslr_db", m.pslr_db},
                     {"azimuth_pslr_db", m.azimuth_pslr_db},
                     {"range_width_m", m.range_width_m},
                     {"azimuth_width_bins", m.azimuth_width_bins},
                     {"entropy", m.entropy},
                     {"ncc_vs_truth", m.ncc_vs_truth}};
  json peaks = json::array();
  for (const Peak& p : run.image.peaks) peaks.push_back({{"n", p.n}, {"q", p.q}, {"amplitude", p.amplitude}});
  meta["peaks"] = peaks;
  json config_json = json::parse(serialize_config(cfg));
  config_json.erase("threads");
  meta["config"] = config_json;
  write_file_atomic(dir / "metadata.json", meta.dump(2) + "\n");
  std::cout << "simulate: " << cfg.scheme << " image in " << dir.string() << "\n"
            << "  ncc = " << m.ncc_vs_truth << ", entropy = " << m.entropy << ", pslr = " << m.pslr_db
            << " dB, mean SNR = " << run.mean_snr_db << " dB\n";
  return 0;
}

int cmd_optimize(const RunConfig& cfg, std::optional<std::size_t> slot) {
  const Scenario sc = make_scenario(cfg);
  const std::filesystem::path dir = std::filesystem::path(cfg.output_dir) / "optimize";
  std::filesystem::create_directories(dir);
  std::vector<std::size_t> slots;
  if (slot) {
    if (*slot >= sc.radar.slots) throw std::out_of_range("--slot exceeds the slot count");
    slots.push_back(*slot);
  } else {
    slots = strided_slots(sc.radar.slots, cfg.sweep.slot_stride);
  }
  const double ps = cfg.radar.transmit_power_w;
  std::vector<SlotSolution> sols(slots.size());
  std::vector<double> pris(slots.size());
  parallel_for(slots.size(), cfg.threads, [&](std::size_t k) {
    const ChannelSlot ch = sample_channel_slot(sc.channel, sc.geom, slots[k]);
    const SnrModel model = make_snr_model(ch, sc.channel, ps);
    OptimizerOptions opt = to_optimizer_options(cfg);
    opt.stream = slots[k];
    sols[k] = optimize_slot(model, cfg.optimizer.power_budget_w, cfg.optimizer.a_max, opt);
    pris[k] = linear_to_db(design_slot(Scheme::kPris, ch, sc, cfg.optimizer.a_max).snr);
  });
  CsvTable t({"slot", "snr_db", "power_w", "max_amplitude", "outer_iterations", "converged", "pris_db"});
  for (std::size_t k = 0; k < slots.size(); ++k) {
    t.row()
        .add(slots[k])
        .add(linear_to_db(sols[k].snr))
        .add(sols[k].power)
        .add(sols[k].phi.cwiseAbs().maxCoeff())
        .add(sols[k].trace.snr_history.size() - 1)
        .add(sols[k].trace.converged ? 1 : 0)
        .add(pris[k]);
  }
  write_file_atomic(dir / "slots.csv", t.str());
  if (slot) {
    std::ostringstream os;
    write_trace_csv(os, sols[0].trace);
    write_file_atomic(dir / ("trace_slot" + std::to_string(*slot) + ".csv"), os.str());
  }
  std::cout << "optimize: " << slots.size() << " slots written to " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ARIS-assisted SAR simulation, imaging and reflection optimisation"};
  app.require_subcommand(1);
  app.fallthrough();
  CommonFlags flags;
  app.add_option("--config", flags.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", flags.seed, "Base random seed");
  app.add_option("--out", flags.out, "Output directory");
  app.add_option("--threads", flags.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--no-noise", flags.no_noise, "Disable receiver and ARIS noise in echoes");

  auto* simulate = app.add_subcommand("simulate", "Synthesise an echo and form its image");
  bool dump_raw = false;
  std::optional<std::string> scheme;
  simulate->add_flag("--dump-raw", dump_raw, "Also write the raw echo (complex64) with a JSON sidecar");
  simulate->add_option("--scheme", scheme, "aris, pris or random")->check(CLI::IsMember({"aris", "pris", "random"}));

  auto* optimize = app.add_subcommand("optimize", "Optimise ARIS coefficients per slot");
  std::optional<std::size_t> slot;
  optimize->add_option("--slot", slot, "Single slot (writes its solver trace)");

  app.add_subcommand("sweep", "Run every experiment in turn");

  auto* experiment = app.add_subcommand("experiment", "Run one named experiment");
  std::string name;
  experiment->add_option("name", name, "Experiment name")
      ->required()
      ->check(CLI::IsMember({"snr-vs-time", "snr-vs-elements", "snr-vs-power", "image", "velocity-sweep"}));

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = resolve_config(flags);
    if (simulate->parsed()) {
      if (scheme) cfg.scheme = *scheme;
      return cmd_simulate(cfg, dump_raw);
    }
    if (optimize->parsed()) return cmd_optimize(cfg, slot);
    if (experiment->parsed()) {
      report(run_experiment(name, cfg));
      return 0;
    }
    for (const char* n : {"snr-vs-time", "snr-vs-elements", "snr-vs-power", "image", "velocity-sweep"})
      report(run_experiment(n, cfg));
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
