#include <doctest.h>

#include <cstring>
#include <fstream>
#include <sstream>

#include "arissar/artifacts.hpp"
#include "arissar/scenes.hpp"

using namespace arissar;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("built-in scenes") {
  const Scene p = point_scene(32, 32, 2.0);
  CHECK(p.nonzero() == 1);
  CHECK(p.reflectivity(16, 16) == 2.0);
  const Scene g = grid3_scene(32, 32);
  CHECK(g.nonzero() == 9);
  CHECK(g.reflectivity(8, 8) == 1.0);
  CHECK(g.reflectivity(24, 24) == 1.0);
  const Scene h = house_scene(32, 32);
  CHECK(h.nonzero() > 40);
  CHECK(h.nonzero() < 400);
  CHECK(make_scene("grid3", {}, 32, 32).nonzero() == 9);
  CHECK_THROWS_AS(make_scene("castle", {}, 32, 32), std::invalid_argument);
}

TEST_CASE("raster scenes are resampled and thresholded") {
  const fs::path path = fs::temp_directory_path() / "arissar_scene.pgm";
  {
    std::ofstream f(path, std::ios::binary);
    f << "P5\n# comment\n4 2\n255\n";
    const unsigned char px[8] = {0, 200, 0, 0, 127, 128, 255, 0};
    f.write(reinterpret_cast<const char*>(px), 8);
  }
  // Two image rows map to azimuth, four columns to range; nearest neighbour.
  const Scene s = raster_scene(path, 2, 4, 3.0);
  CHECK(s.reflectivity(0, 1) == 3.0);
  CHECK(s.reflectivity(0, 0) == 0.0);
  CHECK(s.reflectivity(1, 0) == 0.0);  // 127 is below half scale
  CHECK(s.reflectivity(1, 1) == 3.0);
  CHECK(s.reflectivity(1, 2) == 3.0);
  CHECK(s.nonzero() == 3);
  const Scene up = raster_scene(path, 4, 8);
  CHECK(up.nonzero() == 12);
  {
    std::ofstream f(path);
    f << "P2\n2 1\n255\n0 255\n";
  }
  CHECK(raster_scene(path, 1, 2).nonzero() == 1);
  {
    std::ofstream f(path);
    f << "P6\n1 1\n255\n";
  }
  CHECK_THROWS(raster_scene(path, 2, 2));
  fs::remove(path);
  CHECK_THROWS(raster_scene(path, 2, 2));
}

TEST_CASE("hashing") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("csv formatting") {
  CsvTable t({"name", "x", "n"});
  t.row().add("plain").add(0.1).add(std::int64_t{-3});
  t.row().add("has,comma \"q\"").add(1e300).add(std::size_t{7});
  CHECK(t.rows() == 2);
  CHECK(t.str() == "name,x,n\nplain,0.10000000000000001,-3\n\"has,comma \"\"q\"\"\",1.0000000000000001e+300,7\n");
  CHECK(std::stod(format_double(0.1)) == 0.1);
}

TEST_CASE("pgm and float32 writers") {
  RMatrix img(2, 3, 0.0);
  img(0, 1) = 2.0;
  img(1, 2) = 1.0;
  const std::string pgm = encode_pgm(img);
  const std::string header = "P5\n3 2\n255\n";
  REQUIRE(pgm.substr(0, header.size()) == header);
  REQUIRE(pgm.size() == header.size() + 6);
  CHECK(static_cast<unsigned char>(pgm[header.size() + 1]) == 255);
  CHECK(static_cast<unsigned char>(pgm[header.size() + 5]) == 128);
  CHECK(static_cast<unsigned char>(pgm[header.size()]) == 0);
  CHECK(encode_pgm(RMatrix(1, 2, 5.0)) == std::string("P5\n2 1\n255\n") + std::string(2, '\0'));

  const fs::path dir = fs::temp_directory_path() / "arissar_artifacts";
  fs::create_directories(dir);
  write_pgm(dir / "a.pgm", img);
  CHECK(slurp(dir / "a.pgm") == pgm);
  write_float32(dir / "a.f32", img);
  const std::string raw = slurp(dir / "a.f32");
  REQUIRE(raw.size() == 24);
  float v = 0.0f;
  std::memcpy(&v, raw.data() + 4, 4);
  CHECK(v == 2.0f);
  write_file_atomic(dir / "b.txt", "one");
  write_file_atomic(dir / "b.txt", "two");
  CHECK(slurp(dir / "b.txt") == "two");
  std::size_t leftovers = 0;
  for (const auto& e : fs::directory_iterator(dir)) leftovers += e.path().extension() == ".tmp";
  CHECK(leftovers == 0);
  fs::remove_all(dir);
}
