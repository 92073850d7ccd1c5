#include <doctest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "arissar/artifacts.hpp"
#include "arissar/experiments.hpp"

using namespace arissar;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig small_config(const std::string& out) {
  RunConfig c;
  c.channel.elements = 8;
  c.sweep.seeds = 2;
  c.sweep.image_seeds = 1;
  c.sweep.slot_stride = 64;
  c.sweep.elements = {4, 8};
  c.sweep.transmit_powers_w = {10, 100};
  c.sweep.a_max_values = {20};
  c.sweep.speeds_mps = {30, 60};
  c.scene.source = "point";
  c.output_dir = (fs::temp_directory_path() / out).string();
  return c;
}

void check_same_artifacts(const std::string& name, RunConfig a, RunConfig b) {
  fs::remove_all(a.output_dir);
  fs::remove_all(b.output_dir);
  const ExperimentResult ra = run_experiment(name, a);
  const ExperimentResult rb = run_experiment(name, b);
  REQUIRE(ra.files == rb.files);
  CHECK(ra.failures.empty());
  for (const auto& f : ra.files) {
    INFO(name << "/" << f);
    CHECK(slurp(ra.directory / f) == slurp(rb.directory / f));
  }
  fs::remove_all(a.output_dir);
  fs::remove_all(b.output_dir);
}

}  // namespace

TEST_CASE("scheme names") {
  CHECK(parse_scheme("aris") == Scheme::kAris);
  CHECK(parse_scheme("pris") == Scheme::kPris);
  CHECK(parse_scheme("random") == Scheme::kRandom);
  CHECK(std::string(scheme_name(Scheme::kPris)) == "pris");
  CHECK_THROWS_AS(parse_scheme("other"), std::invalid_argument);
}

TEST_CASE("statistics helpers") {
  CHECK(strided_slots(10, 4) == std::vector<std::size_t>{0, 4, 8});
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 2, 3}, {5, 5, 6}) == doctest::Approx(std::sqrt(3.0) / 2.0));
  const std::vector<std::pair<double, double>> curve{{1, 0}, {10, 20}, {100, 25}};
  CHECK(decade_slope(curve, 1.0) == doctest::Approx(20.0));
  CHECK(decade_slope(curve, 10.0) == doctest::Approx(5.0));
  SweepData d;
  d.points = {{"", 1.0, 1, {{"c", 2.0}}, true, ""}, {"", 1.0, 2, {{"c", 4.0}}, true, ""},
              {"", 2.0, 1, {{"c", 9.0}}, false, "x"}, {"", 2.0, 2, {{"c", 5.0}}, true, ""}};
  const auto m = d.mean_by_x("c");
  REQUIRE(m.size() == 2);
  CHECK(m[0].second == 3.0);
  CHECK(m[1].second == 5.0);
}

TEST_CASE("scenario resolves the automatic gate") {
  const Scenario sc = make_scenario(RunConfig{});
  CHECK(sc.radar.gate_samples == auto_gate_samples(sc.radar, sc.geom));
  RunConfig bad;
  bad.radar.samples = 200;
  CHECK_THROWS(make_scenario(bad));
}

TEST_CASE("slot designs by scheme") {
  const Scenario sc = make_scenario(small_config("arissar_designs"));
  const ChannelSlot ch = sample_channel_slot(sc.channel, sc.geom, 100);
  const SlotDesign aris = design_slot(Scheme::kAris, ch, sc, 20.0);
  const SlotDesign pris = design_slot(Scheme::kPris, ch, sc, 20.0);
  const SlotDesign rnd = design_slot(Scheme::kRandom, ch, sc, 20.0);
  CHECK(aris.power <= 15.0 * (1 + 1e-6));
  CHECK(aris.snr > pris.snr);
  CHECK(pris.snr >= rnd.snr);
  CHECK((pris.phi.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(pris.power == 0.0);
  // Same seed and slot give the same random design.
  CHECK(design_slot(Scheme::kRandom, ch, sc, 20.0).phi == rnd.phi);
}

TEST_CASE("experiment artifacts are identical at any thread count") {
  for (const char* name : {"snr-vs-time", "snr-vs-elements", "snr-vs-power", "image"}) {
    RunConfig a = small_config("arissar_det_a");
    RunConfig b = small_config("arissar_det_b");
    b.threads = 3;
    check_same_artifacts(name, a, b);
  }
}

TEST_CASE("one failing sweep point does not abort the sweep") {
  RunConfig c = small_config("arissar_partial");
  // At this speed the track outruns the receive window.
  c.sweep.speeds_mps = {30, 4000};
  fs::remove_all(c.output_dir);
  const ExperimentResult r = run_experiment("velocity-sweep", c);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].find("v4000") != std::string::npos);
  const std::string csv = slurp(r.directory / "velocity_sweep.csv");
  CHECK(csv.find("v30,") != std::string::npos);
  CHECK(csv.find("v4000") == std::string::npos);
  const auto meta = nlohmann::json::parse(slurp(r.directory / "metadata.json"));
  CHECK(meta["failures"].size() == 1);
  CHECK(meta["seed"] == c.seed);
  c.experiment = "velocity-sweep";
  CHECK(meta["params_hash"] == hex64(params_hash(c)));
  CHECK(meta["config"]["sweep"]["speeds_mps"].size() == 2);
  fs::remove_all(c.output_dir);
}

TEST_CASE("unknown experiment and invalid config") {
  RunConfig c = small_config("arissar_unknown");
  CHECK_THROWS_AS(run_experiment("nope", c), ConfigError);
  c.radar.bandwidth_hz = -1;
  CHECK_THROWS_AS(run_experiment("image", c), ConfigError);
  fs::remove_all(c.output_dir);
}
