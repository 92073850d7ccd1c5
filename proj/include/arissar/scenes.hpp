#pragma once

#include <filesystem>
#include <string>

#include "arissar/echo.hpp"

namespace arissar {

/// A single scatterer at cell (Na/2, Nr/2).
Scene point_scene(std::size_t cells_azimuth, std::size_t cells_range, double amplitude = 1.0);
/// Nine scatterers on the quarter points of the grid.
Scene grid3_scene(std::size_t cells_azimuth, std::size_t cells_range, double amplitude = 1.0);
/// House silhouette outline: walls, pitched roof and a door.
Scene house_scene(std::size_t cells_azimuth, std::size_t cells_range, double amplitude = 1.0);

/// 8-bit PGM (P5 or P2) resampled by nearest neighbour onto the grid and
/// thresholded at half of full scale; row index maps to azimuth.
Scene raster_scene(const std::filesystem::path& path, std::size_t cells_azimuth, std::size_t cells_range,
                   double amplitude = 1.0);

/// Dispatches on "point", "grid3", "house" or "raster" (which reads `path`).
Scene make_scene(const std::string& source, const std::filesystem::path& path, std::size_t cells_azimuth,
                 std::size_t cells_range, double amplitude = 1.0);

}  // namespace arissar
