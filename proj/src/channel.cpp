#include "arissar/channel.hpp"

#include <algorithm>
#include <string>

namespace arissar {

void ChannelParams::validate() const {
  if (elements < 1) throw std::invalid_argument("channel.elements must be at least 1");
  if (!(rician_factor >= 0.0)) throw std::invalid_argument("channel.rician_factor must be non-negative");
  if (!(reference_gain > 0.0)) throw std::invalid_argument("channel.reference_gain must be positive");
  if (!(noise_power > 0.0)) throw std::invalid_argument("channel.noise_power must be positive");
  if (!(aris_noise_in > 0.0)) throw std::invalid_argument("channel.aris_noise_in must be positive");
  if (!(aris_noise_out > 0.0)) throw std::invalid_argument("channel.aris_noise_out must be positive");
}

double ChannelSlot::cell_gain(double cell_distance) const {
  return std::pow(cell_distance / target_distance, -0.5 * exponent_rt);
}

CVector steering_vector(double theta, std::size_t elements) {
  CVector a(static_cast<Eigen::Index>(elements));
  const double step = kPi * std::sin(theta);
  for (std::size_t m = 0; m < elements; ++m)
    a(static_cast<Eigen::Index>(m)) = std::polar(1.0, step * static_cast<double>(m));
  return a;
}

double path_loss(double d, double exponent, double reference_gain) {
  if (!(d > 0.0)) throw std::invalid_argument("path_loss: distance must be positive");
  return std::sqrt(reference_gain * std::pow(d, -exponent));
}

CVector sample_rician(double alpha, double kappa, double theta, std::size_t elements, RngStream& rng) {
  const CVector los = steering_vector(theta, elements);
  if (std::isinf(kappa)) return alpha * los;
  const double w_los = alpha * std::sqrt(kappa / (kappa + 1.0));
  const double w_nlos = alpha * std::sqrt(1.0 / (kappa + 1.0));
  CVector h(static_cast<Eigen::Index>(elements));
  for (Eigen::Index m = 0; m < h.size(); ++m) h(m) = w_los * los(m) + w_nlos * rng.complex_gaussian(1.0);
  return h;
}

double arrival_angle(Vec3 from, Vec3 to) {
  const Vec3 d = to - from;
  const double r = d.norm();
  if (r <= 0.0) throw std::invalid_argument("arrival_angle: coincident points");
  return std::asin(std::clamp(d.z / r, -1.0, 1.0));
}

ChannelSlot sample_channel_slot(const ChannelParams& params, const ScenarioGeometry& geom, std::size_t n) {
  const Vec3 aris = aris_position(geom, n);
  const Vec3 center = geom.grid_center();
  ChannelSlot slot;
  slot.n = n;
  slot.relay_distance = distance(geom.radar_pos, aris);
  slot.target_distance = distance(aris, center);
  slot.exponent_rt = params.exponent_rt;

  RngStream sr(params.seed, StreamKind::kChannelSr, n);
  RngStream rt(params.seed, StreamKind::kChannelRt, n);
  slot.h_sr = sample_rician(path_loss(slot.relay_distance, params.exponent_sr, params.reference_gain),
                            params.rician_factor, arrival_angle(aris, geom.radar_pos), params.elements, sr);
  slot.h_rt = sample_rician(path_loss(slot.target_distance, params.exponent_rt, params.reference_gain),
                            params.rician_factor, arrival_angle(aris, center), params.elements, rt);
  return slot;
}

cd cascade_gain(const CVector& phi, const CVector& h_sr, const CVector& h_rt) {
  if (phi.size() != h_sr.size() || phi.size() != h_rt.size())
    throw std::invalid_argument("reflection vector and channel dimensions differ");
  return (h_sr.array() * h_rt.array() * phi.array()).sum();
}

EquivalentChannels equivalent_channels(const CVector& phi, const ChannelSlot& slot) {
  const cd s = cascade_gain(phi, slot.h_sr, slot.h_rt);
  EquivalentChannels eq;
  eq.target = s * s;
  eq.once = s * (phi.array() * slot.h_rt.array()).matrix();
  eq.twice = (phi.array() * slot.h_sr.array()).matrix();
  return eq;
}

}  // namespace arissar
