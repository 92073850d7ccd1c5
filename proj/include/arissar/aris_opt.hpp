#pragma once

#include <iosfwd>
#include <vector>

#include "arissar/channel.hpp"
#include "arissar/core.hpp"

namespace arissar {

/// Per-slot SNR model: radar power, the three noise powers and the two
/// ARIS channels.
struct SnrModel {
  double transmit_power = 85.0;  // P_s
  double noise_power = 1e-11;    // sigma^2
  double aris_noise_in = 1e-11;  // sigma0^2
  double aris_noise_out = 1e-11; // sigma1^2
  CVector h_sr;
  CVector h_rt;

  std::size_t elements() const { return static_cast<std::size_t>(h_sr.size()); }
  /// Throws std::invalid_argument if a power is negative, sigma^2 is not
  /// positive, or the channels are non-finite or mismatched.
  void validate() const;
};

SnrModel make_snr_model(const ChannelSlot& slot, const ChannelParams& params, double transmit_power);

struct SnrTerms {
  cd cascade;                // s
  double numerator = 0.0;    // P_s |s|^4
  double denominator = 0.0;  // sigma^2 + sigma0^2 |s|^2 ||Phi h_rt||^2 + sigma1^2 ||Phi h_sr||^2
  double once_norm2 = 0.0;   // ||Phi h_rt||^2
  double twice_norm2 = 0.0;  // ||Phi h_sr||^2
};

SnrTerms snr_terms(const CVector& phi, const SnrModel& model);
double compute_snr(const CVector& phi, const SnrModel& model);
/// Power drawn by the ARIS (reduced scalar form).
double aris_power(const CVector& phi, const SnrModel& model);
/// Quadratic-transform auxiliary: the current ratio.
double fp_update_l(const CVector& phi, const SnrModel& model);
/// num - l*den, the ratio objective after the auxiliary substitution; zero
/// when l equals the current ratio.
double fp_objective(const CVector& phi, double l, const SnrModel& model);

/// M^2 x M^2 matrix left (x) right, applied to vec(X) (column-major) as
/// vec(right * X * left^T) without forming it.
struct KroneckerForm {
  Eigen::MatrixXcd left;
  Eigen::MatrixXcd right;

  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& x) const { return right * x * left.transpose(); }
  /// vec(X)^H (left (x) right) vec(X).
  cd quadratic(const Eigen::MatrixXcd& x) const;
  /// x^H (left (x) right) x with x = vec(phi phi^T).
  cd quartic(const CVector& phi) const;
  /// Largest eigenvalue of the Hermitian part by power iteration.
  double max_eigenvalue(int iterations = 500, std::uint64_t seed = 7) const;
  Eigen::MatrixXcd dense() const;  // testing only; M^4 storage
};

/// Matrices expressing the FP objective and the power model in vec(phi phi^T):
///   P_s|s|^4 - l*den = x^H D x - phi^H V phi - c_hat,
///   P(phi)           = x^H H x + phi^H G phi.
/// With w = h_sr.*h_rt, A = conj(w) w^T is Hermitian and W := A.
struct QuadraticForms {
  Eigen::MatrixXcd A;      // conj(w) w^T
  Eigen::VectorXd B;       // diag |h_rt|^2
  KroneckerForm D;         // (P_s A - l sigma0^2 B) (x) A
  Eigen::VectorXd V;       // l sigma1^2 |h_sr|^2
  double c_hat = 0.0;      // l sigma^2
  KroneckerForm H;         // (P_s A + sigma0^2 B) (x) B
  Eigen::VectorXd G;       // P_s |h_sr|^2 + sigma0^2 + sigma1^2
};

QuadraticForms quadratic_forms(double l, const SnrModel& model);

/// Concave quadratic lower bound of the FP objective and convex quadratic
/// upper bound of the power, both tangent at phi_k:
///   O(phi) >= -phi^H diag(V_total) phi + Re{phi^H f_bar} + c0 + c1 - c_hat
///   P(phi) <=  phi^H diag(K) phi + Re{phi^H p_hat} + c2 + c3
/// for every phi with |phi_m| <= a_max.
struct SurrogateForms {
  CVector phi_k;
  double l = 0.0;
  double a_max = 0.0;

  Eigen::VectorXd V;        // l sigma1^2 |h_sr|^2
  Eigen::VectorXd V_total;  // V + objective curvature
  Eigen::VectorXd G;
  Eigen::VectorXd K;        // G + constraint curvature
  CVector f_bar;
  CVector p_hat;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double c_hat = 0.0;

  double lambda1 = 0.0;  // lambda_max of H (exact)
  double lambda2 = 0.0;  // sigma_max(Q + Q^T), constraint Taylor term
  double lambda3 = 0.0;  // sigma_max(F + F^T), objective Taylor term
  double lambda_d = 0.0; // lower bound on lambda_min of D
  double norm4_curvature = 0.0;  // Hessian bound of ||phi||^4 on the box
  double objective_curvature = 0.0;
  double constraint_curvature = 0.0;
};

SurrogateForms build_surrogates(const CVector& phi_k, double l, const SnrModel& model, double a_max);

double objective_surrogate(const SurrogateForms& forms, const CVector& phi);
double constraint_surrogate(const SurrogateForms& forms, const CVector& phi);
/// -phi^H diag(V_total) phi + Re{phi^H f_bar}: the part the subproblem optimises.
double subproblem_objective(const SurrogateForms& forms, const CVector& phi);

/// Per-element maximiser of the Lagrangian for multiplier mu.
CVector subproblem_point(const SurrogateForms& forms, double mu);

enum class SubproblemStatus { kOptimal, kInfeasible };

struct SubproblemResult {
  CVector phi;
  double multiplier = 0.0;
  double constraint_value = 0.0;  // surrogate power at phi
  double objective = 0.0;         // subproblem_objective at phi
  double kkt_residual = 0.0;      // relative complementary slackness
  int iterations = 0;
  SubproblemStatus status = SubproblemStatus::kOptimal;
};

/// Exact solution of the separable convex subproblem by bisection on the
/// power multiplier. Reports kInfeasible when no point of the box meets
/// the surrogate power budget.
SubproblemResult solve_subproblem(const SurrogateForms& forms, double power_budget);

struct OptimizerOptions {
  int max_outer = 100;
  int inner_steps = 1;  // MM steps per auxiliary update
  double tolerance = 1e-6;
  int max_damping = 10;
  double init_power_fraction = 0.9;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;  // slot index for the initial phases
  bool align_phase = true;   // rotate the result so s is real positive
};

struct SolverTrace {
  std::vector<double> l_history;
  std::vector<double> snr_history;      // dB, index 0 = initial point
  std::vector<double> constraint_slack; // P_aris - P(phi), W
  std::vector<int> inner_iterations;    // bisection steps per outer iteration
  int damping_events = 0;
  bool converged = false;
};

struct SlotSolution {
  CVector phi;
  double snr = 0.0;
  double power = 0.0;
  SolverTrace trace;
};

/// Random phases with common amplitude such that the power equals
/// fraction * budget (capped at a_max).
CVector initial_reflection(const SnrModel& model, double power_budget, double a_max, double fraction,
                           RngStream& rng);

/// FP + MM ascent for one slot. Throws std::runtime_error when the
/// surrogate stays infeasible after the allowed damping steps.
SlotSolution optimize_slot(const SnrModel& model, double power_budget, double a_max,
                           const OptimizerOptions& options = {});

/// Unit-modulus phases aligning every cascaded path.
CVector pris_baseline(const SnrModel& model);
/// Passive surface: radar transmits the combined budget, no ARIS noise.
SnrModel pris_model(const SnrModel& model, double total_power);
CVector random_phases(std::size_t elements, RngStream& rng);

/// iteration,l,snr_db,power_slack_w,inner_iterations
void write_trace_csv(std::ostream& os, const SolverTrace& trace);

/// Largest eigenvalue of diag(d) + rho * z z^H (rho >= 0), returned as a
/// tight upper bound.
double max_eigenvalue_diag_rank1(const Eigen::VectorXd& d, double rho, const CVector& z);

}  // namespace arissar
