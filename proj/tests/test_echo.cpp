#include <doctest.h>

#include <fstream>
#include <json.hpp>

#include "arissar/echo.hpp"
#include "arissar/experiments.hpp"
#include "arissar/scenes.hpp"
#include "arissar/waveform.hpp"

using namespace arissar;

namespace {

struct Fixture {
  Scenario sc = make_scenario(RunConfig{});
  std::vector<ChannelSlot> channels = sample_channels(sc);
  std::vector<CVector> phis;
  NoisePowers noise{sc.channel.noise_power, sc.channel.aris_noise_in, sc.channel.aris_noise_out};

  Fixture() {
    RngStream rng(5, StreamKind::kTest, 0);
    for (std::size_t n = 0; n < sc.radar.slots; ++n) phis.push_back(3.0 * random_phases(sc.channel.elements, rng));
  }
  EchoMatrix run(const Scene& s, bool with_noise, std::size_t threads = 1) const {
    EchoOptions o;
    o.noise = with_noise;
    o.threads = threads;
    o.seed = 11;
    return synthesize_echo(s, sc.geom, channels, phis, sc.radar, noise, o);
  }
};

Scene empty_scene(const ScenarioGeometry& g) {
  return Scene{RMatrix(g.cells_azimuth, g.cells_range, 0.0), "empty"};
}

}  // namespace

TEST_CASE("empty scene without noise gives a zero matrix") {
  const Fixture f;
  const EchoMatrix e = f.run(empty_scene(f.sc.geom), false);
  CHECK(e.slots() == 512);
  CHECK(e.samples() == 1024);
  CHECK(e.stage == Stage::kRaw);
  for (const cd& v : e.data.values()) REQUIRE(v == cd{0.0, 0.0});
}

TEST_CASE("single scatterer sample magnitude and phase match the analytic echo") {
  const Fixture f;
  const auto& geom = f.sc.geom;
  const auto& radar = f.sc.radar;
  const Scene s = point_scene(geom.cells_azimuth, geom.cells_range, 0.8);
  const EchoMatrix e = f.run(s, false);
  const std::size_t i = geom.cells_azimuth / 2, j = geom.cells_range / 2;
  const Vec3 p = geom.cell_position(i, j);
  for (std::size_t n : {10u, 100u, 300u, 500u}) {
    const Vec3 a = aris_position(geom, n);
    const double rsr = distance(geom.radar_pos, a), rrt = distance(a, p);
    const double tau = 2.0 * (rsr + rrt) / kSpeedOfLight;
    const cd sgain = cascade_gain(f.phis[n], f.channels[n].h_sr, f.channels[n].h_rt);
    const double g = f.channels[n].cell_gain(rrt);
    const cd coeff = 0.8 * sgain * sgain * g * g;
    const long centre = std::lround(tau / radar.fast_interval()) - radar.gate_samples;
    for (long q : {centre - 100, centre, centre + 77}) {
      const double t = static_cast<double>(q + radar.gate_samples) * radar.fast_interval();
      const cd expected = coeff * transmitted_signal(radar, t - tau);
      const cd got = e.data(n, static_cast<std::size_t>(q));
      CHECK(std::abs(got) == doctest::Approx(std::abs(expected)).epsilon(1e-12));
      CHECK(std::abs(std::arg(got / expected)) < 1e-6);
    }
    // Outside the pulse the row is empty.
    CHECK(e.data(n, static_cast<std::size_t>(centre + 200)) == cd{0.0, 0.0});
  }
  // Slot 0 lies more than half an aperture from the scatterer's zero-Doppler time.
  for (const cd& v : e.data.row(0)) REQUIRE(v == cd{0.0, 0.0});
}

TEST_CASE("echo is linear in the scene") {
  const Fixture f;
  const auto& g = f.sc.geom;
  Scene a = point_scene(g.cells_azimuth, g.cells_range, 1.0);
  Scene b = grid3_scene(g.cells_azimuth, g.cells_range, 0.5);
  Scene sum = a;
  for (std::size_t k = 0; k < sum.reflectivity.size(); ++k)
    sum.reflectivity.values()[k] = 2.0 * a.reflectivity.values()[k] + b.reflectivity.values()[k];
  const EchoMatrix ea = f.run(a, false), eb = f.run(b, false), es = f.run(sum, false);
  double err = 0.0, ref = 0.0;
  for (std::size_t k = 0; k < es.data.size(); ++k) {
    err = std::max(err, std::abs(es.data.values()[k] - 2.0 * ea.data.values()[k] - eb.data.values()[k]));
    ref = std::max(ref, std::abs(es.data.values()[k]));
  }
  CHECK(err <= 1e-10 * ref);
}

TEST_CASE("noise floor variance matches the injected powers") {
  Fixture f;
  const Scene s = empty_scene(f.sc.geom);
  // Receiver noise only.
  for (auto& phi : f.phis) phi.setZero();
  EchoMatrix e = f.run(s, true);
  double p = 0.0;
  for (const cd& v : e.data.values()) p += std::norm(v);
  CHECK(p / static_cast<double>(e.data.size()) == doctest::Approx(f.noise.thermal).epsilon(0.05));
  // With active elements the ARIS output noise adds sigma1^2 ||Phi h_sr||^2.
  Fixture g;
  e = g.run(s, true);
  double measured = 0.0, expected = 0.0;
  for (std::size_t n = 0; n < e.slots(); ++n) {
    for (const cd& v : e.data.row(n)) measured += std::norm(v);
    expected += static_cast<double>(e.samples()) *
                (g.noise.thermal + g.noise.aris_out * (g.phis[n].array() * g.channels[n].h_sr.array()).abs2().sum());
  }
  CHECK(measured == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("echo is bit-identical across thread counts") {
  const Fixture f;
  const Scene s = house_scene(f.sc.geom.cells_azimuth, f.sc.geom.cells_range);
  const EchoMatrix a = f.run(s, true, 1);
  const EchoMatrix b = f.run(s, true, 3);
  CHECK(a.data == b.data);
}

TEST_CASE("echo argument validation") {
  const Fixture f;
  std::vector<CVector> short_phis(f.phis.begin(), f.phis.begin() + 10);
  CHECK_THROWS_AS(synthesize_echo(empty_scene(f.sc.geom), f.sc.geom, f.channels, short_phis, f.sc.radar, f.noise, {}),
                  std::invalid_argument);
  Scene wrong{RMatrix(3, 3, 1.0), "wrong"};
  CHECK_THROWS_AS(f.run(wrong, false), std::invalid_argument);
  RadarParams late = f.sc.radar;
  late.gate_samples += 200;
  CHECK_THROWS_AS(synthesize_echo(empty_scene(f.sc.geom), f.sc.geom, f.channels, f.phis, late, f.noise, {}),
                  std::invalid_argument);
}

TEST_CASE("down-conversion removes the carrier once") {
  const Fixture f;
  const auto& geom = f.sc.geom;
  const auto& radar = f.sc.radar;
  const Scene s = point_scene(geom.cells_azimuth, geom.cells_range);
  const EchoMatrix raw = f.run(s, false);
  const EchoMatrix bb = downconvert(raw, radar);
  CHECK(bb.meta.downconverted);
  CHECK_THROWS_AS(downconvert(bb, radar), std::logic_error);
  const std::size_t n = 256;
  const Vec3 a = aris_position(geom, n);
  const double tau = 2.0 * (distance(geom.radar_pos, a) + distance(a, geom.cell_position(16, 16))) / kSpeedOfLight;
  const long q = std::lround(tau / radar.fast_interval()) - radar.gate_samples + 40;
  const double t = static_cast<double>(q + radar.gate_samples) * radar.fast_interval();
  const cd ratio = bb.data(n, static_cast<std::size_t>(q)) / raw.data(n, static_cast<std::size_t>(q));
  const double cycles = radar.carrier_frequency * t;
  CHECK(std::abs(std::arg(ratio * std::polar(1.0, 2.0 * kPi * (cycles - std::floor(cycles))))) < 1e-9);
}

TEST_CASE("raw dump writes complex64 with a sidecar") {
  EchoMatrix e;
  e.data = CMatrix(2, 3);
  e.data(1, 2) = {1.5, -2.0};
  e.meta.seed = 9;
  e.meta.params_hash = 0xabcULL;
  const auto path = std::filesystem::temp_directory_path() / "arissar_test_dump.c64";
  write_raw_dump(path, e);
  CHECK(std::filesystem::file_size(path) == 2 * 3 * 8);
  std::ifstream in(path, std::ios::binary);
  std::vector<float> buf(12);
  in.read(reinterpret_cast<char*>(buf.data()), 48);
  CHECK(buf[10] == 1.5f);
  CHECK(buf[11] == -2.0f);
  std::ifstream js(path.string() + ".json");
  const auto meta = nlohmann::json::parse(js);
  CHECK(meta["rows"] == 2);
  CHECK(meta["cols"] == 3);
  CHECK(meta["stage"] == "raw");
  CHECK(meta["seed"] == 9);
  CHECK(meta["params_hash"] == "0000000000000abc");
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".json");
}

TEST_CASE("stage guard") {
  EchoMatrix e;
  CHECK_NOTHROW(e.require(Stage::kRaw));
  CHECK_THROWS_AS(e.require(Stage::kImage), std::logic_error);
  ReflectionVector r{CVector::Constant(2, 20.0), 20.0, 15.0};
  CHECK(r.within_cap());
  r.phi(0) = 20.1;
  CHECK_FALSE(r.within_cap());
}
