#include "arissar/scenes.hpp"

#include <fstream>
#include <sstream>

namespace arissar {
namespace {

Scene blank(std::size_t na, std::size_t nr, std::string name) {
  if (na == 0 || nr == 0) throw std::invalid_argument("scene grid must have at least one cell");
  Scene s;
  s.reflectivity = RMatrix(na, nr, 0.0);
  s.name = std::move(name);
  return s;
}

// Next header token of a PGM, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  while (in >> tok) {
    if (tok[0] != '#') return tok;
    std::string rest;
    std::getline(in, rest);
  }
  throw std::runtime_error("truncated PGM header");
}

}  // namespace

Scene point_scene(std::size_t na, std::size_t nr, double amplitude) {
  Scene s = blank(na, nr, "point");
  s.reflectivity(na / 2, nr / 2) = amplitude;
  return s;
}

Scene grid3_scene(std::size_t na, std::size_t nr, double amplitude) {
  Scene s = blank(na, nr, "grid3");
  for (std::size_t a = 1; a <= 3; ++a)
    for (std::size_t r = 1; r <= 3; ++r) s.reflectivity(a * na / 4, r * nr / 4) = amplitude;
  return s;
}

Scene house_scene(std::size_t na, std::size_t nr, double amplitude) {
  Scene s = blank(na, nr, "house");
  // Drawn in a unit square: x across range, y along azimuth (roof at small y).
  auto set = [&](double x, double y) {
    const long i = std::lround(y * static_cast<double>(na - 1));
    const long j = std::lround(x * static_cast<double>(nr - 1));
    if (i >= 0 && j >= 0 && i < static_cast<long>(na) && j < static_cast<long>(nr))
      s.reflectivity(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = amplitude;
  };
  const int steps = static_cast<int>(4 * std::max(na, nr));
  auto line = [&](double x0, double y0, double x1, double y1) {
    for (int k = 0; k <= steps; ++k) {
      const double t = static_cast<double>(k) / steps;
      set(x0 + t * (x1 - x0), y0 + t * (y1 - y0));
    }
  };
  const double left = 0.2, right = 0.8, eave = 0.45, ground = 0.9, ridge = 0.1;
  line(left, eave, right, eave);
  line(left, eave, left, ground);
  line(right, eave, right, ground);
  line(left, ground, right, ground);
  line(left - 0.08, eave, 0.5, ridge);
  line(0.5, ridge, right + 0.08, eave);
  line(0.44, ground, 0.44, 0.68);
  line(0.56, ground, 0.56, 0.68);
  line(0.44, 0.68, 0.56, 0.68);
  return s;
}

Scene raster_scene(const std::filesystem::path& path, std::size_t na, std::size_t nr, double amplitude) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scene raster " + path.string());
  const std::string magic = pgm_token(in);
  if (magic != "P5" && magic != "P2") throw std::runtime_error(path.string() + ": not a PGM (P5/P2) image");
  const long w = std::stol(pgm_token(in));
  const long h = std::stol(pgm_token(in));
  const long maxval = std::stol(pgm_token(in));
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    throw std::runtime_error(path.string() + ": unsupported PGM dimensions or depth");
  std::vector<double> pix(static_cast<std::size_t>(w * h));
  if (magic == "P5") {
    in.get();
    std::vector<unsigned char> raw(pix.size());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw std::runtime_error(path.string() + ": truncated");
    for (std::size_t k = 0; k < raw.size(); ++k) pix[k] = raw[k] / static_cast<double>(maxval);
  } else {
    for (double& p : pix) {
      long v = 0;
      if (!(in >> v)) throw std::runtime_error(path.string() + ": truncated");
      p = static_cast<double>(v) / static_cast<double>(maxval);
    }
  }
  Scene s = blank(na, nr, "raster");
  for (std::size_t i = 0; i < na; ++i) {
    const long row = std::min(h - 1, static_cast<long>((static_cast<double>(i) + 0.5) * h / static_cast<double>(na)));
    for (std::size_t j = 0; j < nr; ++j) {
      const long col = std::min(w - 1, static_cast<long>((static_cast<double>(j) + 0.5) * w / static_cast<double>(nr)));
      if (pix[static_cast<std::size_t>(row * w + col)] >= 0.5) s.reflectivity(i, j) = amplitude;
    }
  }
  return s;
}

Scene make_scene(const std::string& source, const std::filesystem::path& path, std::size_t na, std::size_t nr,
                 double amplitude) {
  if (source == "point") return point_scene(na, nr, amplitude);
  if (source == "grid3") return grid3_scene(na, nr, amplitude);
  if (source == "house") return house_scene(na, nr, amplitude);
  if (source == "raster") return raster_scene(path, na, nr, amplitude);
  throw std::invalid_argument("unknown scene source '" + source + "'");
}

}  // namespace arissar
