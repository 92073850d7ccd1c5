#pragma once

#include <vector>

#include "arissar/core.hpp"
#include "arissar/geometry.hpp"

namespace arissar {

// The pulse envelope is a rectangle of width T_p centred on the delay
// reference, so the compressed response is a real sinc and the carrier
// phase at the peak is exactly -4*pi*f0*R/c.

/// True when relative time t (s) lies inside the pulse envelope.
bool in_pulse(const RadarParams& params, double t);

/// Transmitted sample at fast index q (carrier included).
cd chirp_sample(const RadarParams& params, long q);

/// Transmitted signal at continuous relative time t, carrier included.
cd transmitted_signal(const RadarParams& params, double t);

/// Baseband chirp exp{j*pi*k_r*t^2} inside the envelope, zero outside.
cd baseband_chirp(const RadarParams& params, double t);

/// Range matched filter h_r(p) = exp{-j*pi*k_r*(p*delta_tau)^2} over the pulse
/// support, stored in circular lag order (index q holds lag q for q < Q/2,
/// lag q - length otherwise). A zero length selects Q.
std::vector<cd> range_filter(const RadarParams& params, std::size_t length = 0);

struct MatchedFilters {
  std::vector<cd> range;    // length Q
  std::vector<cd> azimuth;  // length N, centred bin order
  double azimuth_rate = 0.0;  // k_a, Hz/s
  double doppler_bin = 0.0;   // delta_f, Hz
  double wavelength = 0.0;
  double speed = 0.0;
  double reference_range = 0.0;
  std::size_t slots = 0;
};

MatchedFilters make_matched_filters(const RadarParams& params, double speed, double reference_range);

/// h_a over centred bins: element i corresponds to Doppler (i - N/2)*delta_f.
std::vector<cd> azimuth_filter(const MatchedFilters& filters);

/// Signed Doppler frequency of centred bin i.
double doppler_frequency(const MatchedFilters& filters, std::size_t i);

// Analytic point-response signatures used to check the pipeline.
double range_envelope(const RadarParams& params, double fast_time, double range);  // p_r
cd range_phase(const RadarParams& params, double range);                           // phi_r
double azimuth_envelope(double slow_time, double zero_doppler_time, double doppler_bandwidth);  // p_a
cd azimuth_phase(double doppler, double slow_time);                                // phi_a

inline double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

}  // namespace arissar
