#include "arissar/waveform.hpp"

namespace arissar {
namespace {

// exp{j*2*pi*cycles} with the integer part of `cycles` removed first.
cd unit_phasor_cycles(double cycles) {
  const double frac = cycles - std::floor(cycles);
  return std::polar(1.0, 2.0 * kPi * frac);
}

}  // namespace

bool in_pulse(const RadarParams& params, double t) {
  const double half = 0.5 * static_cast<double>(params.pulse_samples()) * params.fast_interval();
  return t >= -half && t < half;
}

cd baseband_chirp(const RadarParams& params, double t) {
  if (!in_pulse(params, t)) return {0.0, 0.0};
  return std::polar(1.0, kPi * params.chirp_rate() * t * t);
}

cd transmitted_signal(const RadarParams& params, double t) {
  if (!in_pulse(params, t)) return {0.0, 0.0};
  const double cycles = params.carrier_frequency * t + 0.5 * params.chirp_rate() * t * t;
  return params.amplitude() * unit_phasor_cycles(cycles);
}

cd chirp_sample(const RadarParams& params, long q) {
  return transmitted_signal(params, static_cast<double>(q) * params.fast_interval());
}

std::vector<cd> range_filter(const RadarParams& params, std::size_t length) {
  const std::size_t q_len = length == 0 ? params.samples : length;
  std::vector<cd> h(q_len, cd{0.0, 0.0});
  const long half = params.pulse_samples() / 2;
  const long total = params.pulse_samples();
  for (long p = -half; p < total - half; ++p) {
    const long idx = p >= 0 ? p : static_cast<long>(q_len) + p;
    if (idx < 0 || idx >= static_cast<long>(q_len)) continue;
    const double t = static_cast<double>(p) * params.fast_interval();
    h[static_cast<std::size_t>(idx)] = std::polar(1.0, -kPi * params.chirp_rate() * t * t);
  }
  return h;
}

MatchedFilters make_matched_filters(const RadarParams& params, double speed, double reference_range) {
  MatchedFilters f;
  f.wavelength = params.wavelength();
  f.speed = speed;
  f.reference_range = reference_range;
  f.slots = params.slots;
  f.doppler_bin = 1.0 / (static_cast<double>(params.slots) * params.slow_interval());
  f.azimuth_rate = 2.0 * speed * speed / (f.wavelength * reference_range);
  f.range = range_filter(params);
  f.azimuth = azimuth_filter(f);
  return f;
}

double doppler_frequency(const MatchedFilters& filters, std::size_t i) {
  return (static_cast<double>(i) - static_cast<double>(filters.slots / 2)) * filters.doppler_bin;
}

std::vector<cd> azimuth_filter(const MatchedFilters& filters) {
  if (filters.azimuth_rate == 0.0 || !std::isfinite(filters.azimuth_rate))
    throw std::invalid_argument("azimuth filter needs a non-zero azimuth rate (zero platform speed?)");
  std::vector<cd> h(filters.slots);
  for (std::size_t i = 0; i < filters.slots; ++i) {
    const double f = doppler_frequency(filters, i);
    h[i] = std::polar(1.0, -kPi * f * f / filters.azimuth_rate);
  }
  return h;
}

double range_envelope(const RadarParams& params, double fast_time, double range) {
  return sinc(params.bandwidth * (fast_time - 2.0 * range / kSpeedOfLight));
}

cd range_phase(const RadarParams& params, double range) {
  return unit_phasor_cycles(-2.0 * params.carrier_frequency * range / kSpeedOfLight);
}

double azimuth_envelope(double slow_time, double zero_doppler_time, double doppler_bandwidth) {
  return sinc(doppler_bandwidth * (slow_time - zero_doppler_time));
}

cd azimuth_phase(double doppler, double slow_time) {
  return std::polar(1.0, 2.0 * kPi * doppler * slow_time);
}

}  // namespace arissar
