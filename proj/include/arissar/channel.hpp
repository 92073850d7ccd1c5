#pragma once

#include <Eigen/Dense>

#include "arissar/core.hpp"
#include "arissar/geometry.hpp"

namespace arissar {

using CVector = Eigen::VectorXcd;

struct ChannelParams {
  std::size_t elements = 32;           // M
  double rician_factor = db_to_linear(3.0);  // kappa, linear
  double exponent_sr = 2.2;
  double exponent_rt = 2.2;
  double reference_gain = db_to_linear(-30.0);  // C0 at 1 m
  double noise_power = dbm_to_watts(-80.0);     // sigma^2
  double aris_noise_in = dbm_to_watts(-80.0);   // sigma0^2
  double aris_noise_out = dbm_to_watts(-80.0);  // sigma1^2
  std::uint64_t seed = 1;

  void validate() const;
};

/// Channels for one slow-time slot. h_rt points at the grid centre; per-cell
/// channels reuse h_rt scaled by the per-cell path-loss ratio.
struct ChannelSlot {
  std::size_t n = 0;
  CVector h_sr;
  CVector h_rt;
  double relay_distance = 0.0;   // d_sr
  double target_distance = 0.0;  // d_rt to the grid centre
  double exponent_rt = 2.2;

  /// Amplitude ratio alpha(d_cell) / alpha(d_rt) for a cell at distance d_cell.
  double cell_gain(double cell_distance) const;
};

/// Half-wavelength ULA response, element m = exp{j*pi*m*sin(theta)}.
CVector steering_vector(double theta, std::size_t elements);

/// alpha = sqrt(C0 * d^-eps). Throws for d <= 0.
double path_loss(double d, double exponent, double reference_gain);

/// One Rician draw: alpha*sqrt(k/(k+1))*a(theta) + alpha*sqrt(1/(k+1))*h_NLoS.
/// An infinite kappa yields the pure line-of-sight response.
CVector sample_rician(double alpha, double kappa, double theta, std::size_t elements, RngStream& rng);

/// The array axis is vertical, so theta is the elevation of the far end
/// seen from the ARIS.
double arrival_angle(Vec3 from, Vec3 to);

/// Deterministic in (params.seed, n); each link draws from its own stream.
ChannelSlot sample_channel_slot(const ChannelParams& params, const ScenarioGeometry& geom, std::size_t n);

struct EquivalentChannels {
  cd target;        // h_n
  CVector once;     // h0 = Phi h_rt h_rt^T Phi h_sr
  CVector twice;    // h1 = Phi h_sr
};

EquivalentChannels equivalent_channels(const CVector& phi, const ChannelSlot& slot);

/// s = sum_m h_sr,m h_rt,m phi_m; h_n = s^2.
cd cascade_gain(const CVector& phi, const CVector& h_sr, const CVector& h_rt);

}  // namespace arissar
