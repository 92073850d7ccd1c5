#pragma once

#include <vector>

#include "arissar/echo.hpp"
#include "arissar/geometry.hpp"
#include "arissar/waveform.hpp"

namespace arissar {

struct Peak {
  std::size_t n = 0;
  std::size_t q = 0;
  double amplitude = 0.0;
};

struct ImageMetrics {
  double pslr_db = 0.0;             // range cut through the strongest peak
  double azimuth_pslr_db = 0.0;
  double range_width_m = 0.0;       // -3 dB
  double azimuth_width_bins = 0.0;  // -3 dB, slow-time bins
  double entropy = 0.0;
  double ncc_vs_truth = 0.0;
};

struct ImageResult {
  RMatrix magnitude;  // N x Q
  EchoMatrix focused;
  std::vector<Peak> peaks;
  ImageMetrics metrics;
  bool has_metrics = false;
};

struct ImagingOptions {
  std::size_t threads = 1;
  int rcmc_taps = 8;
  bool fractional_delay = true;  // compensate the sub-sample part of the relay shift
};

/// Matched filtering along fast time by zero-padded FFT correlation. A point
/// at total range R peaks at absolute sample round(2R/(c*delta_tau)).
EchoMatrix range_compress(EchoMatrix y, const RadarParams& params, std::size_t threads = 1);

/// Moves each row earlier by 2*R_sr(n)/(c*delta_tau) samples and removes the
/// relay carrier phase. The integer part is an index shift. The remainder
/// is applied as a linear phase across range frequency when
/// `fractional_delay` is set.
EchoMatrix remove_relay_delay(EchoMatrix y, const RadarParams& params, const std::vector<double>& relay_distance,
                              const ImagingOptions& options = {});

/// Column-wise FFT; row i of the result holds Doppler bin (i - N/2)*delta_f.
EchoMatrix azimuth_fft(EchoMatrix y, std::size_t threads = 1);

/// Range-cell migration shift in samples for centred Doppler bin i.
double rcmc_shift_samples(const MatchedFilters& filters, const RadarParams& params, std::size_t i);

/// Truncated-sinc range interpolation removing the quadratic migration.
/// Output samples whose kernel leaves the row fall back to nearest
/// neighbour; the count is recorded in meta.rcmc_fallbacks.
EchoMatrix rcmc(EchoMatrix y, const MatchedFilters& filters, const RadarParams& params,
                const ImagingOptions& options = {});

/// Azimuth matched filter then inverse FFT (normalised by 1/N).
ImageResult azimuth_compress(EchoMatrix y, const MatchedFilters& filters, std::size_t threads = 1);

/// Delay removal through azimuth compression for a down-converted raw
/// matrix; metrics are left unset.
ImageResult form_image(EchoMatrix raw_downconverted, const RadarParams& params, const ScenarioGeometry& geom,
                       const ImagingOptions& options = {});

/// Local maxima at least `floor_ratio` of the global maximum, strongest
/// first, at most `limit` entries.
std::vector<Peak> find_peaks(const RMatrix& magnitude, double floor_ratio = 0.5, std::size_t limit = 32);

/// Image position (slow bin, fast sample) where a cell focuses.
struct CellPosition {
  double slot = 0.0;
  double sample = 0.0;
};
CellPosition cell_image_position(const ScenarioGeometry& geom, const RadarParams& params, std::size_t i,
                                 std::size_t j);

/// Truth map drawn at each cell's rounded image position.
RMatrix rasterize_truth(const Scene& scene, const ScenarioGeometry& geom, const RadarParams& params);

struct CutMetrics {
  double pslr_db = 0.0;
  double width = 0.0;  // -3 dB, samples
};
/// Measures a 1-D cut around index `peak` after x16 band-limited upsampling.
CutMetrics cut_metrics(const std::vector<cd>& cut, std::size_t peak, std::size_t half_window = 32,
                       std::size_t upsample = 16);

double image_entropy(const RMatrix& magnitude);

/// Pearson correlation between |g| over all cells and the image magnitude
/// at each cell's nearest image sample.
double image_ncc(const RMatrix& magnitude, const Scene& truth, const ScenarioGeometry& geom,
                 const RadarParams& params);

/// Fills img.metrics. Throws for an empty image.
void image_metrics(ImageResult& img, const Scene& truth, const ScenarioGeometry& geom, const RadarParams& params);

}  // namespace arissar
