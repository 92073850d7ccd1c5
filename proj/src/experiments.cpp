#include "arissar/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>
#include <mutex>
#include <numeric>
#include <set>

#include "arissar/artifacts.hpp"
#include "arissar/parallel.hpp"
#include "arissar/scenes.hpp"

namespace arissar {
namespace {

using json = nlohmann::ordered_json;

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string aris_column(double a_max) { return "aris_a" + fmt_g(a_max) + "_db"; }

RunConfig with_seed(const RunConfig& c, std::uint64_t seed) {
  RunConfig out = c;
  out.seed = seed;
  return out;
}

// Mean over the strided slots of each scheme's SNR in dB.
double mean_db(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t k = 0; k < idx.size();) {
    std::size_t e = k;
    while (e + 1 < idx.size() && v[idx[e + 1]] == v[idx[k]]) ++e;
    const double avg = 0.5 * static_cast<double>(k + e) + 1.0;
    for (std::size_t t = k; t <= e; ++t) r[idx[t]] = avg;
    k = e + 1;
  }
  return r;
}

// Runs fn(point) for every point on the worker pool, recording failures
// on the point instead of aborting the sweep.
template <typename Fn>
void run_points(std::vector<SweepPoint>& points, std::size_t threads, Fn&& fn) {
  parallel_for(points.size(), threads, [&](std::size_t k) {
    try {
      fn(points[k]);
    } catch (const std::exception& e) {
      points[k].ok = false;
      points[k].error = e.what();
      points[k].values.clear();
    }
  });
}

std::string point_name(const SweepPoint& p) {
  return (p.label.empty() ? fmt_g(p.x) : p.label) + "/seed" + std::to_string(p.seed);
}

}  // namespace

Scenario make_scenario(const RunConfig& config) {
  const auto problems = validate_config(config);
  if (!problems.empty()) throw ConfigError("invalid configuration: " + problems.front(), problems);
  Scenario sc;
  sc.config = config;
  sc.radar = to_radar_params(config);
  sc.geom = make_geometry(to_geometry_setup(config), sc.radar);
  sc.radar.gate_samples =
      config.radar.gate_samples < 0 ? auto_gate_samples(sc.radar, sc.geom) : config.radar.gate_samples;
  sc.radar.validate();
  check_receive_window(sc.radar, sc.geom);
  sc.channel = to_channel_params(config);
  sc.channel.validate();
  return sc;
}

Scheme parse_scheme(const std::string& name) {
  if (name == "aris") return Scheme::kAris;
  if (name == "pris") return Scheme::kPris;
  if (name == "random") return Scheme::kRandom;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

const char* scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::kAris: return "aris";
    case Scheme::kPris: return "pris";
    case Scheme::kRandom: return "random";
  }
  return "unknown";
}

std::vector<ChannelSlot> sample_channels(const Scenario& sc, std::size_t threads) {
  std::vector<ChannelSlot> out(sc.radar.slots);
  parallel_for(out.size(), threads, [&](std::size_t n) { out[n] = sample_channel_slot(sc.channel, sc.geom, n); });
  return out;
}

SlotDesign design_slot(Scheme scheme, const ChannelSlot& slot, const Scenario& sc, double a_max) {
  const double ps = sc.config.radar.transmit_power_w;
  const double p_aris = sc.config.optimizer.power_budget_w;
  const SnrModel model = make_snr_model(slot, sc.channel, ps);
  SlotDesign d;
  if (scheme == Scheme::kAris) {
    OptimizerOptions opt = to_optimizer_options(sc.config);
    opt.stream = slot.n;
    SlotSolution sol = optimize_slot(model, p_aris, a_max, opt);
    d.phi = std::move(sol.phi);
    d.snr = sol.snr;
    d.power = sol.power;
    d.outer_iterations = sol.trace.snr_history.size() - 1;
    return d;
  }
  const SnrModel passive = pris_model(model, ps + p_aris);
  if (scheme == Scheme::kPris) {
    d.phi = pris_baseline(passive);
  } else {
    RngStream rng(sc.config.seed, StreamKind::kRandomPhase, slot.n);
    d.phi = random_phases(passive.elements(), rng);
  }
  d.snr = compute_snr(d.phi, passive);
  return d;
}

Scene scenario_scene(const Scenario& sc) {
  return make_scene(sc.config.scene.source, sc.config.scene.path, sc.geom.cells_azimuth, sc.geom.cells_range,
                    sc.config.scene.amplitude);
}

ImageRun run_image(const Scenario& sc, Scheme scheme, double a_max, const Scene& scene, std::size_t threads,
                   const std::filesystem::path& raw_dump) {
  const std::vector<ChannelSlot> channels = sample_channels(sc, threads);
  ImageRun run;
  run.designs.resize(channels.size());
  parallel_for(channels.size(), threads,
               [&](std::size_t n) { run.designs[n] = design_slot(scheme, channels[n], sc, a_max); });
  std::vector<CVector> phis(channels.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < channels.size(); ++n) {
    phis[n] = run.designs[n].phi;
    acc += linear_to_db(run.designs[n].snr);
  }
  run.mean_snr_db = acc / static_cast<double>(channels.size());

  RadarParams radar = sc.radar;
  NoisePowers noise{sc.channel.noise_power, sc.channel.aris_noise_in, sc.channel.aris_noise_out};
  if (scheme != Scheme::kAris) {
    radar.transmit_power = sc.config.radar.transmit_power_w + sc.config.optimizer.power_budget_w;
    noise.aris_in = 0.0;
    noise.aris_out = 0.0;
  }
  EchoOptions eo;
  eo.noise = sc.config.noise;
  eo.once_noise = sc.config.echo.once_noise;
  eo.aperture_time = sc.config.echo.aperture_time_s;
  eo.threads = threads;
  eo.seed = sc.config.seed;
  eo.params_hash = params_hash(sc.config);
  EchoMatrix raw = synthesize_echo(scene, sc.geom, channels, phis, radar, noise, eo);
  if (!raw_dump.empty()) write_raw_dump(raw_dump, raw);
  ImagingOptions io = to_imaging_options(sc.config);
  io.threads = threads;
  run.image = form_image(downconvert(std::move(raw), radar), radar, sc.geom, io);
  image_metrics(run.image, scene, sc.geom, radar);
  return run;
}

std::vector<std::size_t> strided_slots(std::size_t slots, std::size_t stride) {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < slots; n += std::max<std::size_t>(1, stride)) out.push_back(n);
  return out;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length series");
  const std::vector<double> rx = ranks(x), ry = ranks(y);
  const double mx = mean_db(rx), my = mean_db(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < rx.size(); ++k) {
    sxy += (rx[k] - mx) * (ry[k] - my);
    sxx += (rx[k] - mx) * (rx[k] - mx);
    syy += (ry[k] - my) * (ry[k] - my);
  }
  return (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
}

std::vector<std::pair<double, double>> SweepData::mean_by_x(const std::string& column) const {
  std::map<double, std::pair<double, std::size_t>> acc;
  for (const SweepPoint& p : points) {
    if (!p.ok) continue;
    auto it = p.values.find(column);
    if (it == p.values.end()) continue;
    auto& a = acc[p.x];
    a.first += it->second;
    ++a.second;
  }
  std::vector<std::pair<double, double>> out;
  for (const auto& [x, a] : acc) out.emplace_back(x, a.first / static_cast<double>(a.second));
  return out;
}

double decade_slope(const std::vector<std::pair<double, double>>& curve, double x0) {
  auto at = [&](double x) {
    const double lx = std::log10(x);
    for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
      const double a = std::log10(curve[k].first), b = std::log10(curve[k + 1].first);
      if (lx >= a - 1e-12 && lx <= b + 1e-12) {
        const double t = b > a ? (lx - a) / (b - a) : 0.0;
        return curve[k].second + t * (curve[k + 1].second - curve[k].second);
      }
    }
    throw std::invalid_argument("decade_slope: decade outside the sweep range");
  };
  return at(10.0 * x0) - at(x0);
}

SnrTimeData snr_vs_time(const RunConfig& config, std::vector<std::string>* failures) {
  const std::size_t seeds = config.sweep.seeds;
  std::vector<std::vector<SnrTimeRow>> per_seed(seeds);
  std::vector<std::string> errors(seeds);
  parallel_for(seeds, config.threads, [&](std::size_t k) {
    try {
      const Scenario sc = make_scenario(with_seed(config, config.seed + k));
      for (std::size_t n : strided_slots(sc.radar.slots, config.sweep.slot_stride)) {
        const ChannelSlot ch = sample_channel_slot(sc.channel, sc.geom, n);
        SnrTimeRow r;
        r.seed = sc.config.seed;
        r.slot = n;
        r.time_s = static_cast<double>(n) * sc.radar.slow_interval();
        r.relay_distance_m = ch.relay_distance;
        r.aris_db = linear_to_db(design_slot(Scheme::kAris, ch, sc, config.optimizer.a_max).snr);
        r.pris_db = linear_to_db(design_slot(Scheme::kPris, ch, sc, config.optimizer.a_max).snr);
        r.random_db = linear_to_db(design_slot(Scheme::kRandom, ch, sc, config.optimizer.a_max).snr);
        per_seed[k].push_back(r);
      }
    } catch (const std::exception& e) {
      per_seed[k].clear();
      errors[k] = e.what();
    }
  });
  SnrTimeData data;
  double gain = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < seeds; ++k) {
    if (!errors[k].empty()) {
      if (failures) failures->push_back("seed" + std::to_string(config.seed + k) + ": " + errors[k]);
      continue;
    }
    std::vector<double> dist, snr;
    for (const SnrTimeRow& r : per_seed[k]) {
      data.rows.push_back(r);
      dist.push_back(r.relay_distance_m);
      snr.push_back(r.aris_db);
      gain += r.aris_db - r.pris_db;
      ++count;
    }
    data.spearman_aris.push_back(dist.size() >= 2 ? spearman(dist, snr) : 0.0);
  }
  data.mean_gain_db = count ? gain / static_cast<double>(count) : 0.0;
  return data;
}

SweepData snr_vs_elements(const RunConfig& config) {
  SweepData data;
  for (double a : config.sweep.a_max_values) data.columns.push_back(aris_column(a));
  data.columns.push_back("pris_db");
  data.columns.push_back("random_db");
  for (std::size_t m : config.sweep.elements)
    for (std::size_t k = 0; k < config.sweep.seeds; ++k) {
      SweepPoint p;
      p.x = static_cast<double>(m);
      p.seed = config.seed + k;
      data.points.push_back(p);
    }
  run_points(data.points, config.threads, [&](SweepPoint& p) {
    RunConfig c = with_seed(config, p.seed);
    c.channel.elements = static_cast<std::size_t>(p.x);
    const Scenario sc = make_scenario(c);
    std::map<std::string, std::vector<double>> series;
    for (std::size_t n : strided_slots(sc.radar.slots, c.sweep.slot_stride)) {
      const ChannelSlot ch = sample_channel_slot(sc.channel, sc.geom, n);
      for (double a : c.sweep.a_max_values)
        series[aris_column(a)].push_back(linear_to_db(design_slot(Scheme::kAris, ch, sc, a).snr));
      series["pris_db"].push_back(linear_to_db(design_slot(Scheme::kPris, ch, sc, c.optimizer.a_max).snr));
      series["random_db"].push_back(linear_to_db(design_slot(Scheme::kRandom, ch, sc, c.optimizer.a_max).snr));
    }
    for (const auto& [col, v] : series) p.values[col] = mean_db(v);
  });
  return data;
}

SweepData snr_vs_power(const RunConfig& config) {
  SweepData data;
  for (double a : config.sweep.a_max_values) data.columns.push_back(aris_column(a));
  data.columns.push_back("pris_db");
  for (double ps : config.sweep.transmit_powers_w)
    for (std::size_t k = 0; k < config.sweep.seeds; ++k) {
      SweepPoint p;
      p.x = ps;
      p.seed = config.seed + k;
      data.points.push_back(p);
    }
  run_points(data.points, config.threads, [&](SweepPoint& p) {
    RunConfig c = with_seed(config, p.seed);
    c.radar.transmit_power_w = p.x;
    const Scenario sc = make_scenario(c);
    std::map<std::string, std::vector<double>> series;
    for (std::size_t n : strided_slots(sc.radar.slots, c.sweep.slot_stride)) {
      const ChannelSlot ch = sample_channel_slot(sc.channel, sc.geom, n);
      for (double a : c.sweep.a_max_values)
        series[aris_column(a)].push_back(linear_to_db(design_slot(Scheme::kAris, ch, sc, a).snr));
      series["pris_db"].push_back(linear_to_db(design_slot(Scheme::kPris, ch, sc, c.optimizer.a_max).snr));
    }
    for (const auto& [col, v] : series) p.values[col] = mean_db(v);
  });
  return data;
}

namespace {

const std::vector<std::string> kImageColumns{"ncc", "entropy", "pslr_db", "range_width_m", "azimuth_width_bins",
                                             "mean_snr_db"};

void image_point(SweepPoint& p, const RunConfig& c, Scheme scheme, double a_max, const std::filesystem::path& dir,
                 bool write_raw, std::vector<std::string>& files, std::mutex& files_mutex) {
  const Scenario sc = make_scenario(c);
  const Scene scene = scenario_scene(sc);
  const ImageRun run = run_image(sc, scheme, a_max, scene, 1);
  const ImageMetrics& m = run.image.metrics;
  p.values["ncc"] = m.ncc_vs_truth;
  p.values["entropy"] = m.entropy;
  p.values["pslr_db"] = m.pslr_db;
  p.values["range_width_m"] = m.range_width_m;
  p.values["azimuth_width_bins"] = m.azimuth_width_bins;
  p.values["mean_snr_db"] = run.mean_snr_db;
  if (dir.empty()) return;
  const std::string stem = "image_" + p.label + "_seed" + std::to_string(p.seed);
  write_pgm(dir / (stem + ".pgm"), run.image.magnitude);
  std::lock_guard lock(files_mutex);
  files.push_back(stem + ".pgm");
  if (write_raw) {
    write_float32(dir / (stem + ".f32"), run.image.magnitude);
    files.push_back(stem + ".f32");
  }
}

}  // namespace

SweepData image_comparison(const RunConfig& config, const std::filesystem::path& image_dir,
                           std::vector<std::string>* files) {
  SweepData data;
  data.columns = kImageColumns;
  std::vector<double> a_values = config.sweep.a_max_values;
  std::sort(a_values.rbegin(), a_values.rend());
  for (std::size_t k = 0; k < config.sweep.image_seeds; ++k) {
    for (double a : a_values) {
      SweepPoint p;
      p.label = "aris_a" + fmt_g(a);
      p.x = a;
      p.seed = config.seed + k;
      data.points.push_back(p);
    }
    SweepPoint p;
    p.label = "pris";
    p.x = 0.0;
    p.seed = config.seed + k;
    data.points.push_back(p);
  }
  std::vector<std::string> written;
  std::mutex mu;
  run_points(data.points, config.threads, [&](SweepPoint& p) {
    const Scheme scheme = p.label == "pris" ? Scheme::kPris : Scheme::kAris;
    image_point(p, with_seed(config, p.seed), scheme, p.x, image_dir, p.seed == config.seed, written, mu);
  });
  std::sort(written.begin(), written.end());
  if (files) files->insert(files->end(), written.begin(), written.end());
  return data;
}

SweepData velocity_sweep(const RunConfig& config, const std::filesystem::path& image_dir,
                         std::vector<std::string>* files) {
  SweepData data;
  data.columns = kImageColumns;
  for (double v : config.sweep.speeds_mps)
    for (std::size_t k = 0; k < config.sweep.image_seeds; ++k) {
      SweepPoint p;
      p.label = "v" + fmt_g(v);
      p.x = v;
      p.seed = config.seed + k;
      data.points.push_back(p);
    }
  std::vector<std::string> written;
  std::mutex mu;
  run_points(data.points, config.threads, [&](SweepPoint& p) {
    RunConfig c = with_seed(config, p.seed);
    // N and the PRF stay fixed, so the aperture time is the same at every speed.
    c.geometry.speed_mps = p.x;
    image_point(p, c, Scheme::kAris, c.optimizer.a_max, image_dir, p.seed == config.seed, written, mu);
  });
  std::sort(written.begin(), written.end());
  if (files) files->insert(files->end(), written.begin(), written.end());
  return data;
}

namespace {

std::string sweep_csv(const SweepData& data, const std::string& x_name, bool with_label) {
  std::vector<std::string> header;
  if (with_label) header.push_back("label");
  header.push_back(x_name);
  header.push_back("seed");
  header.insert(header.end(), data.columns.begin(), data.columns.end());
  CsvTable t(header);
  for (const SweepPoint& p : data.points) {
    if (!p.ok) continue;
    t.row();
    if (with_label) t.add(p.label);
    t.add(p.x);
    t.add(static_cast<std::int64_t>(p.seed));
    for (const std::string& col : data.columns) t.add(p.values.at(col));
  }
  return t.str();
}

void collect_failures(const SweepData& data, std::vector<std::string>& failures) {
  for (const SweepPoint& p : data.points)
    if (!p.ok) failures.push_back(point_name(p) + ": " + p.error);
}

void summarize_means(const SweepData& data, const std::string& prefix, std::map<std::string, double>& summary) {
  for (const std::string& col : data.columns)
    for (const auto& [x, v] : data.mean_by_x(col)) summary[prefix + fmt_g(x) + "." + col] = v;
}

}  // namespace

ExperimentResult run_experiment(const std::string& name, const RunConfig& config) {
  RunConfig cfg = config;
  cfg.experiment = name;
  const auto problems = validate_config(cfg);
  if (!problems.empty()) throw ConfigError("invalid configuration: " + problems.front(), problems);

  ExperimentResult res;
  res.name = name;
  res.directory = std::filesystem::path(cfg.output_dir) / name;
  std::filesystem::create_directories(res.directory);
  json notes = json::array();

  if (name == "snr-vs-time") {
    const SnrTimeData d = snr_vs_time(cfg, &res.failures);
    CsvTable t({"seed", "slot", "time_s", "relay_distance_m", "aris_db", "pris_db", "random_db"});
    for (const SnrTimeRow& r : d.rows)
      t.row()
          .add(static_cast<std::int64_t>(r.seed))
          .add(r.slot)
          .add(r.time_s)
          .add(r.relay_distance_m)
          .add(r.aris_db)
          .add(r.pris_db)
          .add(r.random_db);
    write_file_atomic(res.directory / "snr_vs_time.csv", t.str());
    res.files.push_back("snr_vs_time.csv");
    res.summary["mean_gain_db"] = d.mean_gain_db;
    double highest = -1.0;
    for (double s : d.spearman_aris) highest = std::max(highest, s);
    res.summary["max_spearman_snr_vs_distance"] = highest;
  } else if (name == "snr-vs-elements") {
    const SweepData d = snr_vs_elements(cfg);
    write_file_atomic(res.directory / "snr_vs_elements.csv", sweep_csv(d, "elements", false));
    res.files.push_back("snr_vs_elements.csv");
    collect_failures(d, res.failures);
    summarize_means(d, "M", res.summary);
  } else if (name == "snr-vs-power") {
    const SweepData d = snr_vs_power(cfg);
    write_file_atomic(res.directory / "snr_vs_power.csv", sweep_csv(d, "transmit_power_w", false));
    res.files.push_back("snr_vs_power.csv");
    collect_failures(d, res.failures);
    summarize_means(d, "Ps", res.summary);
    const double a_top = *std::max_element(cfg.sweep.a_max_values.begin(), cfg.sweep.a_max_values.end());
    const auto curve = d.mean_by_x(aris_column(a_top));
    if (curve.size() >= 2 && curve.back().first >= 10.0 * curve.front().first) {
      res.summary["bottom_decade_slope_db"] = decade_slope(curve, curve.front().first);
      res.summary["top_decade_slope_db"] = decade_slope(curve, curve.back().first / 10.0);
    }
  } else if (name == "image") {
    const SweepData d = image_comparison(cfg, res.directory, &res.files);
    write_file_atomic(res.directory / "image_metrics.csv", sweep_csv(d, "a_max", true));
    res.files.push_back("image_metrics.csv");
    collect_failures(d, res.failures);
    std::map<std::string, std::pair<double, std::size_t>> ncc;
    for (const SweepPoint& p : d.points)
      if (p.ok) {
        ncc[p.label].first += p.values.at("ncc");
        ++ncc[p.label].second;
      }
    for (const auto& [label, a] : ncc) res.summary[label + ".ncc"] = a.first / static_cast<double>(a.second);
  } else if (name == "velocity-sweep") {
    const SweepData d = velocity_sweep(cfg, res.directory, &res.files);
    write_file_atomic(res.directory / "velocity_sweep.csv", sweep_csv(d, "speed_mps", true));
    res.files.push_back("velocity_sweep.csv");
    collect_failures(d, res.failures);
    summarize_means(d, "v", res.summary);
    notes.push_back("slot count and PRF are held fixed, so every speed shares the same aperture time");
  } else {
    throw std::invalid_argument("unknown experiment '" + name + "'");
  }

  json meta;
  meta["experiment"] = name;
  meta["params_hash"] = hex64(params_hash(cfg));
  meta["seed"] = cfg.seed;
  meta["files"] = res.files;
  meta["failures"] = res.failures;
  json summary = json::object();
  for (const auto& [k, v] : res.summary) summary[k] = v;
  meta["summary"] = summary;
  meta["notes"] = notes;
  json config_json = json::parse(serialize_config(cfg));
  config_json.erase("threads");
  config_json.erase("output_dir");
  meta["config"] = config_json;
  meta["config_source"] = cfg.source_text;
  write_file_atomic(res.directory / "metadata.json", meta.dump(2) + "\n");
  res.files.push_back("metadata.json");
  return res;
}

}  // namespace arissar
