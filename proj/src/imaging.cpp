#include "arissar/imaging.hpp"

#include <algorithm>
#include <limits>

#include "arissar/fft.hpp"
#include "arissar/parallel.hpp"

namespace arissar {
namespace {

// Column n of a row-major matrix, gathered and scattered.
void gather_column(const CMatrix& m, std::size_t c, std::vector<cd>& out) {
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] = m(r, c);
}
void scatter_column(CMatrix& m, std::size_t c, const std::vector<cd>& in) {
  for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) = in[r];
}

// Signed frequency index of DFT bin k for length n.
double signed_bin(std::size_t k, std::size_t n) {
  return k < (n + 1) / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
}

}  // namespace

EchoMatrix range_compress(EchoMatrix y, const RadarParams& params, std::size_t threads) {
  y.require(Stage::kRaw);
  if (!y.meta.downconverted) throw std::logic_error("range compression needs down-converted data");
  const std::size_t q_len = y.samples();
  const std::size_t nfft = next_pow2(q_len + static_cast<std::size_t>(params.pulse_samples()));

  // Correlation with the baseband chirp: Y = IFFT(X * conj(FFT(c))), c = conj(h_r).
  std::vector<cd> ref = range_filter(params, nfft);
  for (cd& v : ref) v = std::conj(v);
  const FftPlan fwd(nfft, FftPlan::Direction::kForward);
  const FftPlan inv(nfft, FftPlan::Direction::kInverse);
  fwd.execute(ref);
  const double scale = 1.0 / static_cast<double>(nfft);
  for (cd& v : ref) v = std::conj(v) * scale;

  parallel_for(y.slots(), threads, [&](std::size_t n) {
    std::vector<cd> buf(nfft, cd{0.0, 0.0});
    auto row = y.data.row(n);
    std::copy(row.begin(), row.end(), buf.begin());
    fwd.execute(buf);
    for (std::size_t k = 0; k < nfft; ++k) buf[k] *= ref[k];
    inv.execute(buf);
    std::copy(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(q_len), row.begin());
  });
  y.stage = Stage::kRangeCompressed;
  return y;
}

EchoMatrix remove_relay_delay(EchoMatrix y, const RadarParams& params, const std::vector<double>& relay_distance,
                              const ImagingOptions& options) {
  y.require(Stage::kRangeCompressed);
  if (relay_distance.size() != y.slots())
    throw std::invalid_argument("remove_relay_delay: need one relay distance per slot");
  const std::size_t q_len = y.samples();
  const double to_samples = 2.0 / (kSpeedOfLight * params.fast_interval());
  const std::size_t nfft = next_pow2(2 * q_len);
  const FftPlan fwd(nfft, FftPlan::Direction::kForward);
  const FftPlan inv(nfft, FftPlan::Direction::kInverse);

  for (double r : relay_distance) {
    const double shift = r * to_samples;
    if (!(std::abs(shift) < static_cast<double>(q_len)))
      throw std::invalid_argument("relay delay shift exceeds the row length");
  }

  parallel_for(y.slots(), options.threads, [&](std::size_t n) {
    const double exact = relay_distance[n] * to_samples;
    const long whole = std::lround(exact);
    const double frac = exact - static_cast<double>(whole);
    auto row = y.data.row(n);
    std::vector<cd> shifted(q_len, cd{0.0, 0.0});
    for (std::size_t q = 0; q < q_len; ++q) {
      const long src = static_cast<long>(q) + whole;
      if (src >= 0 && src < static_cast<long>(q_len)) shifted[q] = row[static_cast<std::size_t>(src)];
    }
    if (options.fractional_delay && frac != 0.0) {
      std::vector<cd> buf(nfft, cd{0.0, 0.0});
      std::copy(shifted.begin(), shifted.end(), buf.begin());
      fwd.execute(buf);
      const double inv_n = 1.0 / static_cast<double>(nfft);
      for (std::size_t k = 0; k < nfft; ++k)
        buf[k] *= std::polar(inv_n, 2.0 * kPi * signed_bin(k, nfft) * frac / static_cast<double>(nfft));
      inv.execute(buf);
      std::copy(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(q_len), shifted.begin());
    }
    const double cycles = 2.0 * params.carrier_frequency * relay_distance[n] / kSpeedOfLight;
    const cd rot = std::polar(1.0, 2.0 * kPi * (cycles - std::floor(cycles)));
    for (std::size_t q = 0; q < q_len; ++q) row[q] = shifted[q] * rot;
  });
  y.stage = Stage::kDelayRemoved;
  return y;
}

EchoMatrix azimuth_fft(EchoMatrix y, std::size_t threads) {
  y.require(Stage::kDelayRemoved);
  const std::size_t n_slots = y.slots();
  const FftPlan fwd(n_slots, FftPlan::Direction::kForward);
  parallel_for(y.samples(), threads, [&](std::size_t q) {
    std::vector<cd> col(n_slots);
    gather_column(y.data, q, col);
    fwd.execute(col);
    fft_shift(col);
    scatter_column(y.data, q, col);
  });
  y.stage = Stage::kAzimuthFreq;
  return y;
}

double rcmc_shift_samples(const MatchedFilters& filters, const RadarParams& params, std::size_t i) {
  const double f = doppler_frequency(filters, i);
  const double lambda = filters.wavelength;
  const double dr = lambda * lambda * filters.reference_range * f * f / (8.0 * filters.speed * filters.speed);
  return 2.0 * dr / (kSpeedOfLight * params.fast_interval());
}

EchoMatrix rcmc(EchoMatrix y, const MatchedFilters& filters, const RadarParams& params,
                const ImagingOptions& options) {
  y.require(Stage::kAzimuthFreq);
  if (options.rcmc_taps < 2) throw std::invalid_argument("rcmc kernel needs at least two taps");
  const long q_len = static_cast<long>(y.samples());
  const long taps = options.rcmc_taps;
  const long lead = taps / 2 - 1;  // taps at floor(x) - lead .. floor(x) + taps - 1 - lead
  std::vector<std::size_t> fallbacks(y.slots(), 0);

  parallel_for(y.slots(), options.threads, [&](std::size_t i) {
    const double shift = rcmc_shift_samples(filters, params, i);
    if (shift == 0.0) return;
    auto row = y.data.row(i);
    std::vector<cd> out(row.size(), cd{0.0, 0.0});
    for (long q = 0; q < q_len; ++q) {
      const double x = static_cast<double>(q) + shift;
      const long base = static_cast<long>(std::floor(x));
      const long lo = base - lead;
      const long hi = lo + taps - 1;
      if (lo < 0 || hi >= q_len) {
        const long nearest = std::lround(x);
        if (nearest >= 0 && nearest < q_len) out[static_cast<std::size_t>(q)] = row[static_cast<std::size_t>(nearest)];
        ++fallbacks[i];
        continue;
      }
      cd acc{0.0, 0.0};
      for (long k = lo; k <= hi; ++k) acc += row[static_cast<std::size_t>(k)] * sinc(x - static_cast<double>(k));
      out[static_cast<std::size_t>(q)] = acc;
    }
    std::copy(out.begin(), out.end(), row.begin());
  });
  for (std::size_t f : fallbacks) y.meta.rcmc_fallbacks += f;
  y.stage = Stage::kRcmcDone;
  return y;
}

ImageResult azimuth_compress(EchoMatrix y, const MatchedFilters& filters, std::size_t threads) {
  y.require(Stage::kRcmcDone);
  const std::size_t n_slots = y.slots();
  if (filters.azimuth.size() != n_slots) throw std::invalid_argument("azimuth filter length differs from N");
  const FftPlan inv(n_slots, FftPlan::Direction::kInverse);
  const double scale = 1.0 / static_cast<double>(n_slots);
  parallel_for(y.samples(), threads, [&](std::size_t q) {
    std::vector<cd> col(n_slots);
    gather_column(y.data, q, col);
    for (std::size_t i = 0; i < n_slots; ++i) col[i] *= filters.azimuth[i];
    ifft_shift(col);
    inv.execute(col);
    for (cd& v : col) v *= scale;
    scatter_column(y.data, q, col);
  });
  y.stage = Stage::kImage;

  ImageResult img;
  img.magnitude = RMatrix(y.slots(), y.samples());
  for (std::size_t k = 0; k < y.data.size(); ++k) img.magnitude.values()[k] = std::abs(y.data.values()[k]);
  img.peaks = find_peaks(img.magnitude);
  img.focused = std::move(y);
  return img;
}

ImageResult form_image(EchoMatrix raw, const RadarParams& params, const ScenarioGeometry& geom,
                       const ImagingOptions& options) {
  std::vector<double> relay(params.slots);
  for (std::size_t n = 0; n < params.slots; ++n) relay[n] = distance(geom.radar_pos, aris_position(geom, n));
  const MatchedFilters filters = make_matched_filters(params, geom.speed, reference_range(geom));
  EchoMatrix y = range_compress(std::move(raw), params, options.threads);
  y = remove_relay_delay(std::move(y), params, relay, options);
  y = azimuth_fft(std::move(y), options.threads);
  y = rcmc(std::move(y), filters, params, options);
  return azimuth_compress(std::move(y), filters, options.threads);
}

std::vector<Peak> find_peaks(const RMatrix& mag, double floor_ratio, std::size_t limit) {
  std::vector<Peak> peaks;
  if (mag.empty()) return peaks;
  const double top = *std::max_element(mag.values().begin(), mag.values().end());
  if (!(top > 0.0)) return peaks;
  const double floor = floor_ratio * top;
  const long rows = static_cast<long>(mag.rows());
  const long cols = static_cast<long>(mag.cols());
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      const double v = mag(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      if (v < floor) continue;
      bool is_max = true;
      for (long dr = -1; dr <= 1 && is_max; ++dr) {
        for (long dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const long rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
          const double w = mag(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
          // Ties keep the first occurrence in scan order.
          if (w > v || (w == v && (dr < 0 || (dr == 0 && dc < 0)))) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), v});
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.amplitude > b.amplitude; });
  if (peaks.size() > limit) peaks.resize(limit);
  return peaks;
}

CellPosition cell_image_position(const ScenarioGeometry& geom, const RadarParams& params, std::size_t i,
                                 std::size_t j) {
  const Vec3 p = geom.cell_position(i, j);
  CellPosition pos;
  pos.slot = zero_doppler_time(geom, p) / geom.slow_interval;
  pos.sample = 2.0 * closest_range(geom, p) / (kSpeedOfLight * params.fast_interval()) -
               static_cast<double>(params.gate_samples);
  return pos;
}

RMatrix rasterize_truth(const Scene& scene, const ScenarioGeometry& geom, const RadarParams& params) {
  RMatrix out(params.slots, params.samples, 0.0);
  for (std::size_t i = 0; i < geom.cells_azimuth; ++i) {
    for (std::size_t j = 0; j < geom.cells_range; ++j) {
      const CellPosition pos = cell_image_position(geom, params, i, j);
      const long n = std::lround(pos.slot);
      const long q = std::lround(pos.sample);
      if (n < 0 || q < 0 || n >= static_cast<long>(params.slots) || q >= static_cast<long>(params.samples)) continue;
      out(static_cast<std::size_t>(n), static_cast<std::size_t>(q)) = std::abs(scene.reflectivity(i, j));
    }
  }
  return out;
}

CutMetrics cut_metrics(const std::vector<cd>& cut, std::size_t peak, std::size_t half_window, std::size_t upsample) {
  if (cut.empty() || peak >= cut.size()) throw std::invalid_argument("cut_metrics: peak outside the cut");
  const std::size_t w = 2 * half_window;
  std::vector<cd> win(w, cd{0.0, 0.0});
  for (std::size_t k = 0; k < w; ++k) {
    const long src = static_cast<long>(peak) - static_cast<long>(half_window) + static_cast<long>(k);
    if (src >= 0 && src < static_cast<long>(cut.size())) win[k] = cut[static_cast<std::size_t>(src)];
  }
  // Band-limited interpolation: zero-pad the centred spectrum.
  const std::size_t up = w * upsample;
  FftPlan(w, FftPlan::Direction::kForward).execute(win);
  std::vector<cd> spec(up, cd{0.0, 0.0});
  const std::size_t half = w / 2;
  for (std::size_t k = 0; k < half; ++k) spec[k] = win[k];
  for (std::size_t k = half + 1; k < w; ++k) spec[up - w + k] = win[k];
  spec[half] = 0.5 * win[half];
  spec[up - half] = 0.5 * win[half];
  FftPlan(up, FftPlan::Direction::kInverse).execute(spec);

  std::vector<double> mag(up);
  for (std::size_t k = 0; k < up; ++k) mag[k] = std::abs(spec[k]);
  // Search the main peak near the window centre.
  const std::size_t centre = half_window * upsample;
  std::size_t pk = centre;
  for (std::size_t k = centre - upsample; k <= centre + upsample; ++k)
    if (mag[k] > mag[pk]) pk = k;
  const double top = mag[pk];
  if (!(top > 0.0)) throw std::invalid_argument("cut_metrics: zero peak");

  std::size_t left = pk, right = pk;
  while (left > 0 && mag[left - 1] <= mag[left]) --left;
  while (right + 1 < up && mag[right + 1] <= mag[right]) ++right;
  double side = 0.0;
  for (std::size_t k = 0; k < up; ++k)
    if (k < left || k > right) side = std::max(side, mag[k]);

  const double level = top / std::sqrt(2.0);
  auto crossing = [&](long from, long step) {
    long k = from;
    while (k + step >= 0 && k + step < static_cast<long>(up) && mag[static_cast<std::size_t>(k + step)] >= level)
      k += step;
    const long nxt = k + step;
    if (nxt < 0 || nxt >= static_cast<long>(up)) return static_cast<double>(k);
    const double a = mag[static_cast<std::size_t>(k)], b = mag[static_cast<std::size_t>(nxt)];
    return static_cast<double>(k) + static_cast<double>(step) * (a - level) / (a - b);
  };
  CutMetrics m;
  m.width = (crossing(static_cast<long>(pk), 1) - crossing(static_cast<long>(pk), -1)) / static_cast<double>(upsample);
  m.pslr_db = side > 0.0 ? 20.0 * std::log10(side / top) : -std::numeric_limits<double>::infinity();
  return m;
}

double image_entropy(const RMatrix& magnitude) {
  if (magnitude.empty()) throw std::invalid_argument("image_entropy: empty image");
  double total = 0.0;
  for (double v : magnitude.values()) total += v;
  if (!(total > 0.0)) return 0.0;
  double h = 0.0;
  for (double v : magnitude.values()) {
    if (v <= 0.0) continue;
    const double p = v / total;
    h -= p * std::log(p);
  }
  return h;
}

double image_ncc(const RMatrix& magnitude, const Scene& truth, const ScenarioGeometry& geom,
                 const RadarParams& params) {
  const long rows = static_cast<long>(magnitude.rows());
  const long cols = static_cast<long>(magnitude.cols());
  std::vector<double> a, b;
  for (std::size_t i = 0; i < geom.cells_azimuth; ++i) {
    for (std::size_t j = 0; j < geom.cells_range; ++j) {
      const CellPosition pos = cell_image_position(geom, params, i, j);
      const long r = std::lround(pos.slot);
      const long c = std::lround(pos.sample);
      double v = 0.0;
      if (r >= 0 && r < rows && c >= 0 && c < cols) v = magnitude(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      a.push_back(std::abs(truth.reflectivity(i, j)));
      b.push_back(v);
    }
  }
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ma += a[k];
    mb += b[k];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

void image_metrics(ImageResult& img, const Scene& truth, const ScenarioGeometry& geom, const RadarParams& params) {
  if (img.magnitude.empty()) throw std::invalid_argument("image_metrics: empty image");
  img.focused.require(Stage::kImage);
  const auto& vals = img.magnitude.values();
  const std::size_t arg = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  const std::size_t n = arg / img.magnitude.cols();
  const std::size_t q = arg % img.magnitude.cols();
  const CMatrix& data = img.focused.data;

  std::vector<cd> range_cut(data.row(n).begin(), data.row(n).end());
  std::vector<cd> az_cut(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r) az_cut[r] = data(r, q);
  const CutMetrics rc = cut_metrics(range_cut, q);
  const CutMetrics ac = cut_metrics(az_cut, n);

  img.metrics.pslr_db = rc.pslr_db;
  img.metrics.range_width_m = rc.width * kSpeedOfLight * params.fast_interval() / 2.0;
  img.metrics.azimuth_pslr_db = ac.pslr_db;
  img.metrics.azimuth_width_bins = ac.width;
  img.metrics.entropy = image_entropy(img.magnitude);
  img.metrics.ncc_vs_truth = image_ncc(img.magnitude, truth, geom, params);
  img.has_metrics = true;
}

}  // namespace arissar
