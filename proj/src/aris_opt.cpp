#include "arissar/aris_opt.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

namespace arissar {
namespace {

double norm2(const CVector& v) { return v.squaredNorm(); }

// Re{phi^T conj(S) phi} for S = sum_k coef_k a_k b_k^T.
struct RankTerm {
  cd coef;
  CVector a;
  CVector b;
};

double bilinear_value(const std::vector<RankTerm>& terms, const CVector& phi) {
  cd acc{0.0, 0.0};
  // phi^T conj(a b^T) phi = conj(phi^H a) conj(phi^H b); Eigen's x.dot(y) is x^H y.
  for (const RankTerm& t : terms) acc += std::conj(t.coef * phi.dot(t.a) * phi.dot(t.b));
  return acc.real();
}

// (S + S^T) conj(phi) for S = sum_k coef_k a_k b_k^T.
CVector bilinear_gradient(const std::vector<RankTerm>& terms, const CVector& phi) {
  CVector g = CVector::Zero(phi.size());
  const CVector pc = phi.conjugate();
  for (const RankTerm& t : terms) {
    g += t.coef * t.a * (t.b.transpose() * pc)(0);
    g += t.coef * t.b * (t.a.transpose() * pc)(0);
  }
  return g;
}

// Largest singular value of S + S^T using an orthonormal basis of the
// spanning vectors, so only a tiny core matrix is decomposed.
double sigma_max_symmetrized(const std::vector<RankTerm>& terms, Eigen::Index m) {
  Eigen::MatrixXcd span(m, static_cast<Eigen::Index>(2 * terms.size()));
  for (std::size_t k = 0; k < terms.size(); ++k) {
    span.col(static_cast<Eigen::Index>(2 * k)) = terms[k].a;
    span.col(static_cast<Eigen::Index>(2 * k + 1)) = terms[k].b;
  }
  Eigen::MatrixXcd s_full;
  if (m <= span.cols()) {
    s_full = Eigen::MatrixXcd::Zero(m, m);
    for (const RankTerm& t : terms) s_full += t.coef * (t.a * t.b.transpose() + t.b * t.a.transpose());
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(s_full).singularValues()(0);
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(span);
  const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(m, span.cols());
  // S + S^T = q C q^T, C = sum coef (alpha beta^T + beta alpha^T), alpha = q^H a.
  Eigen::MatrixXcd core = Eigen::MatrixXcd::Zero(span.cols(), span.cols());
  for (const RankTerm& t : terms) {
    const CVector alpha = q.adjoint() * t.a;
    const CVector beta = q.adjoint() * t.b;
    core += t.coef * (alpha * beta.transpose() + beta * alpha.transpose());
  }
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(core).singularValues()(0);
}

bool finite(const CVector& v) { return v.allFinite(); }

}  // namespace

void SnrModel::validate() const {
  if (h_sr.size() == 0 || h_sr.size() != h_rt.size()) throw std::invalid_argument("SnrModel: channel sizes differ");
  if (!finite(h_sr) || !finite(h_rt)) throw std::invalid_argument("SnrModel: non-finite channel entries");
  if (!(transmit_power > 0.0)) throw std::invalid_argument("SnrModel: transmit power must be positive");
  if (!(noise_power > 0.0)) throw std::invalid_argument("SnrModel: noise power must be positive");
  if (!(aris_noise_in >= 0.0) || !(aris_noise_out >= 0.0))
    throw std::invalid_argument("SnrModel: ARIS noise powers must be non-negative");
}

SnrModel make_snr_model(const ChannelSlot& slot, const ChannelParams& params, double transmit_power) {
  SnrModel m;
  m.transmit_power = transmit_power;
  m.noise_power = params.noise_power;
  m.aris_noise_in = params.aris_noise_in;
  m.aris_noise_out = params.aris_noise_out;
  m.h_sr = slot.h_sr;
  m.h_rt = slot.h_rt;
  return m;
}

SnrTerms snr_terms(const CVector& phi, const SnrModel& model) {
  SnrTerms t;
  t.cascade = cascade_gain(phi, model.h_sr, model.h_rt);
  const double s2 = std::norm(t.cascade);
  t.once_norm2 = (phi.array() * model.h_rt.array()).abs2().sum();
  t.twice_norm2 = (phi.array() * model.h_sr.array()).abs2().sum();
  t.numerator = model.transmit_power * s2 * s2;
  t.denominator = model.noise_power + model.aris_noise_in * s2 * t.once_norm2 + model.aris_noise_out * t.twice_norm2;
  return t;
}

double compute_snr(const CVector& phi, const SnrModel& model) {
  const SnrTerms t = snr_terms(phi, model);
  return t.numerator / t.denominator;
}

double aris_power(const CVector& phi, const SnrModel& model) {
  const SnrTerms t = snr_terms(phi, model);
  return model.transmit_power * t.twice_norm2 + model.aris_noise_in * t.once_norm2 * t.once_norm2 +
         model.transmit_power * std::norm(t.cascade) * t.once_norm2 +
         (model.aris_noise_in + model.aris_noise_out) * norm2(phi);
}

double fp_update_l(const CVector& phi, const SnrModel& model) { return compute_snr(phi, model); }

double fp_objective(const CVector& phi, double l, const SnrModel& model) {
  const SnrTerms t = snr_terms(phi, model);
  return t.numerator - l * t.denominator;
}

cd KroneckerForm::quadratic(const Eigen::MatrixXcd& x) const { return (x.conjugate().cwiseProduct(apply(x))).sum(); }

cd KroneckerForm::quartic(const CVector& phi) const { return quadratic(phi * phi.transpose()); }

double KroneckerForm::max_eigenvalue(int iterations, std::uint64_t seed) const {
  const Eigen::Index m = right.rows();
  const Eigen::Index mm = left.rows();
  // Shift by a spectral-norm bound so the largest eigenvalue dominates.
  const double shift = left.norm() * right.norm();
  auto herm = [&](const Eigen::MatrixXcd& x) {
    const Eigen::MatrixXcd forward = apply(x);
    const Eigen::MatrixXcd backward = right.adjoint() * x * left.adjoint().transpose();
    return Eigen::MatrixXcd(0.5 * (forward + backward) + shift * x);
  };
  RngStream rng(seed, StreamKind::kTest, 0);
  Eigen::MatrixXcd x(m, mm);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.complex_gaussian(1.0);
  x /= x.norm();
  double rayleigh = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::MatrixXcd y = herm(x);
    rayleigh = (x.conjugate().cwiseProduct(y)).sum().real();
    const double ny = y.norm();
    if (ny == 0.0) break;
    x = y / ny;
  }
  return rayleigh - shift;
}

Eigen::MatrixXcd KroneckerForm::dense() const {
  const Eigen::Index a = left.rows(), b = right.rows();
  Eigen::MatrixXcd out(a * b, left.cols() * right.cols());
  for (Eigen::Index i = 0; i < a; ++i)
    for (Eigen::Index j = 0; j < left.cols(); ++j) out.block(i * b, j * right.cols(), b, right.cols()) = left(i, j) * right;
  return out;
}

double max_eigenvalue_diag_rank1(const Eigen::VectorXd& d, double rho, const CVector& z) {
  const double dmax = d.maxCoeff();
  const Eigen::VectorXd z2 = z.cwiseAbs2();
  const double zz = z2.sum();
  if (rho <= 0.0 || zz == 0.0) return dmax;
  // Secular equation 1 - rho * sum |z_i|^2 / (lambda - d_i) = 0; its largest
  // root lies in (dmax, dmax + rho ||z||^2].
  auto secular = [&](double lambda) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (z2(i) == 0.0) continue;
      const double gap = lambda - d(i);
      if (gap <= 0.0) return -std::numeric_limits<double>::infinity();
      acc += z2(i) / gap;
    }
    return 1.0 - rho * acc;
  };
  double lo = dmax, hi = dmax + rho * zz;
  if (secular(lo) >= 0.0) return lo;
  for (int it = 0; it < 200 && hi > lo; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (secular(mid) < 0.0 ? lo : hi) = mid;
  }
  return hi;
}

QuadraticForms quadratic_forms(double l, const SnrModel& model) {
  const CVector w = model.h_sr.cwiseProduct(model.h_rt);
  const double ps = model.transmit_power;
  QuadraticForms f;
  f.A = w.conjugate() * w.transpose();
  f.B = model.h_rt.cwiseAbs2();
  const Eigen::MatrixXcd bd = f.B.cast<cd>().asDiagonal();
  // The cross term uses B (x) A; since x = vec(phi phi^T) is symmetric,
  // A (x) B gives the same value, so no symmetrised form is needed.
  f.D.left = ps * f.A - l * model.aris_noise_in * bd;
  f.D.right = f.A;
  f.V = l * model.aris_noise_out * model.h_sr.cwiseAbs2();
  f.c_hat = l * model.noise_power;
  f.H.left = ps * f.A + model.aris_noise_in * bd;
  f.H.right = bd;
  f.G = (ps * model.h_sr.cwiseAbs2()).array() + (model.aris_noise_in + model.aris_noise_out);
  return f;
}

SurrogateForms build_surrogates(const CVector& phi_k, double l, const SnrModel& model, double a_max) {
  if (!finite(model.h_sr) || !finite(model.h_rt)) throw std::invalid_argument("non-finite channel entries");
  if (!finite(phi_k)) throw std::invalid_argument("non-finite reflection vector");
  if (phi_k.size() != model.h_sr.size()) throw std::invalid_argument("reflection vector and channel sizes differ");
  const Eigen::Index m = phi_k.size();
  const double ps = model.transmit_power;
  const double s0 = model.aris_noise_in;
  const CVector w = model.h_sr.cwiseProduct(model.h_rt);
  const Eigen::VectorXd b = model.h_rt.cwiseAbs2();
  const cd s = (w.array() * phi_k.array()).sum();
  const CVector bphi = b.cast<cd>().cwiseProduct(phi_k);
  const CVector aphi = s * w.conjugate();  // A phi
  const double n2 = norm2(phi_k);
  const double n4 = n2 * n2;
  const double once = phi_k.dot(bphi).real();  // ||Phi h_rt||^2

  SurrogateForms f;
  f.phi_k = phi_k;
  f.l = l;
  f.a_max = a_max;
  f.norm4_curvature = 12.0 * static_cast<double>(m) * a_max * a_max;
  const double l4 = f.norm4_curvature;

  // Power: x^H H x with H = Hh (x) B, Hh = P_s A + sigma0^2 B.
  const CVector hh_phi = ps * aphi + s0 * bphi;
  const double p4 = (ps * std::norm(s) + s0 * once) * once;
  f.lambda1 = max_eigenvalue_diag_rank1(s0 * b, ps, w.conjugate()) * b.maxCoeff();
  const std::vector<RankTerm> q_terms{{2.0, bphi, hh_phi}, {-2.0 * f.lambda1, phi_k, phi_k}};
  const CVector g_q = bilinear_gradient(q_terms, phi_k);
  f.lambda2 = sigma_max_symmetrized(q_terms, m);
  f.constraint_curvature = 0.5 * f.lambda2 + 0.5 * f.lambda1 * l4;
  f.G = (ps * model.h_sr.cwiseAbs2()).array() + (s0 + model.aris_noise_out);
  f.K = f.G.array() + f.constraint_curvature;
  f.p_hat = g_q + (4.0 * f.lambda1 * n2 - 2.0 * f.constraint_curvature) * phi_k;
  f.c2 = (f.lambda1 * n4 - p4) - 3.0 * f.lambda1 * n4 + 0.5 * f.lambda1 * l4 * n2;
  f.c3 = bilinear_value(q_terms, phi_k) - phi_k.dot(g_q).real() + 0.5 * f.lambda2 * n2;

  // Objective: x^H D x with D = E (x) A, E = P_s A - l sigma0^2 B. The
  // eigenvalues of D are lambda_i(E) * {||w||^2, 0}, and lambda_min(E) is
  // at least -l sigma0^2 max(b) (exact for a single element).
  const CVector e_phi = ps * aphi - l * s0 * bphi;
  const double w2 = w.squaredNorm();
  if (m == 1) {
    f.lambda_d = (ps * w2 - l * s0 * b(0)) * w2;
  } else {
    f.lambda_d = std::min(0.0, -l * s0 * b.maxCoeff() * w2);
  }
  const double d_raw = (ps * std::norm(s) - l * s0 * once) * std::norm(s);
  const double d_k = d_raw - f.lambda_d * n4;
  const std::vector<RankTerm> f_terms{{2.0, aphi, e_phi}, {-2.0 * f.lambda_d, phi_k, phi_k}};
  const CVector g_f = bilinear_gradient(f_terms, phi_k);
  f.lambda3 = sigma_max_symmetrized(f_terms, m);
  f.objective_curvature = 0.5 * f.lambda3 + 0.5 * std::max(0.0, -f.lambda_d) * l4;
  f.V = l * model.aris_noise_out * model.h_sr.cwiseAbs2();
  f.V_total = f.V.array() + f.objective_curvature;
  f.f_bar = g_f + (4.0 * f.lambda_d * n2 + 2.0 * f.objective_curvature) * phi_k;
  f.c0 = -d_k - 3.0 * f.lambda_d * n4;
  f.c1 = bilinear_value(f_terms, phi_k) - phi_k.dot(g_f).real() - f.objective_curvature * n2;
  f.c_hat = l * model.noise_power;
  return f;
}

double subproblem_objective(const SurrogateForms& f, const CVector& phi) {
  return -(f.V_total.array() * phi.array().abs2()).sum() + phi.dot(f.f_bar).real();
}

double objective_surrogate(const SurrogateForms& f, const CVector& phi) {
  return subproblem_objective(f, phi) + f.c0 + f.c1 - f.c_hat;
}

double constraint_surrogate(const SurrogateForms& f, const CVector& phi) {
  return (f.K.array() * phi.array().abs2()).sum() + phi.dot(f.p_hat).real() + f.c2 + f.c3;
}

CVector subproblem_point(const SurrogateForms& f, double mu) {
  const Eigen::Index m = f.phi_k.size();
  CVector phi(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const cd num = f.f_bar(i) - mu * f.p_hat(i);
    const double den = 2.0 * (f.V_total(i) + mu * f.K(i));
    const double mag = std::abs(num);
    if (den <= 0.0) {
      phi(i) = mag > 0.0 ? num * (f.a_max / mag) : cd{0.0, 0.0};
      continue;
    }
    const cd v = num / den;
    const double r = std::abs(v);
    phi(i) = r > f.a_max ? v * (f.a_max / r) : v;
  }
  return phi;
}

SubproblemResult solve_subproblem(const SurrogateForms& f, double budget) {
  SubproblemResult res;
  auto finish = [&](CVector phi, double mu) {
    res.phi = std::move(phi);
    res.multiplier = mu;
    res.constraint_value = constraint_surrogate(f, res.phi);
    res.objective = subproblem_objective(f, res.phi);
    const double slack = budget - res.constraint_value;
    res.kkt_residual = std::abs(mu * slack) / (std::abs(res.objective) + mu * budget + 1e-300);
    return res;
  };

  CVector free_point = subproblem_point(f, 0.0);
  if (constraint_surrogate(f, free_point) <= budget) return finish(std::move(free_point), 0.0);

  // The mu -> infinity limit minimises the surrogate power over the box.
  CVector limit(f.phi_k.size());
  for (Eigen::Index i = 0; i < limit.size(); ++i) {
    const cd v = -f.p_hat(i) / (2.0 * f.K(i));
    const double r = std::abs(v);
    limit(i) = r > f.a_max ? v * (f.a_max / r) : v;
  }
  if (constraint_surrogate(f, limit) > budget) {
    res.status = SubproblemStatus::kInfeasible;
    return finish(std::move(limit), std::numeric_limits<double>::infinity());
  }

  double lo = 0.0;
  double hi = 1.0;
  for (Eigen::Index i = 0; i < f.K.size(); ++i) hi = std::max(hi, f.V_total(i) / f.K(i));
  int doublings = 0;
  while (constraint_surrogate(f, subproblem_point(f, hi)) > budget) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 1100) return finish(std::move(limit), std::numeric_limits<double>::infinity());
  }
  const double tol = 1e-8 * budget;
  int it = 0;
  for (; it < 300; ++it) {
    const double g_hi = constraint_surrogate(f, subproblem_point(f, hi));
    if (budget - g_hi <= tol) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (constraint_surrogate(f, subproblem_point(f, mid)) <= budget ? hi : lo) = mid;
  }
  res.iterations = it + doublings;
  return finish(subproblem_point(f, hi), hi);
}

CVector random_phases(std::size_t elements, RngStream& rng) {
  CVector phi(static_cast<Eigen::Index>(elements));
  for (Eigen::Index i = 0; i < phi.size(); ++i) phi(i) = std::polar(1.0, 2.0 * kPi * rng.uniform());
  return phi;
}

CVector initial_reflection(const SnrModel& model, double budget, double a_max, double fraction, RngStream& rng) {
  const CVector unit = random_phases(model.elements(), rng);
  // P(a * unit) = c2 a^2 + c4 a^4.
  const SnrTerms t = snr_terms(unit, model);
  const double c2 = model.transmit_power * t.twice_norm2 +
                    (model.aris_noise_in + model.aris_noise_out) * static_cast<double>(unit.size());
  const double c4 = model.aris_noise_in * t.once_norm2 * t.once_norm2 +
                    model.transmit_power * std::norm(t.cascade) * t.once_norm2;
  const double target = fraction * budget;
  // Positive root of c4 x^2 + c2 x = target in the cancellation-free form.
  const double a2 = 2.0 * target / (c2 + std::sqrt(c2 * c2 + 4.0 * c4 * target));
  const double a = std::min(std::sqrt(a2), a_max);
  return a * unit;
}

SlotSolution optimize_slot(const SnrModel& model, double budget, double a_max, const OptimizerOptions& options) {
  model.validate();
  if (!(budget > 0.0)) throw std::invalid_argument("ARIS power budget must be positive");
  if (!(a_max > 0.0)) throw std::invalid_argument("a_max must be positive");
  RngStream rng(options.seed, StreamKind::kOptimizerInit, options.stream);
  CVector phi = initial_reflection(model, budget, a_max, options.init_power_fraction, rng);

  SolverTrace trace;
  double snr = compute_snr(phi, model);
  trace.snr_history.push_back(linear_to_db(snr));
  trace.constraint_slack.push_back(budget - aris_power(phi, model));
  trace.l_history.push_back(0.0);
  trace.inner_iterations.push_back(0);

  for (int outer = 0; outer < options.max_outer; ++outer) {
    double l = fp_update_l(phi, model);
    int bisections = 0;
    CVector candidate = phi;
    for (int inner = 0; inner < options.inner_steps; ++inner) {
      SubproblemResult sub;
      for (int damp = 0;; ++damp) {
        sub = solve_subproblem(build_surrogates(candidate, l, model, a_max), budget);
        if (sub.status == SubproblemStatus::kOptimal) break;
        if (damp >= options.max_damping)
          throw std::runtime_error("ARIS subproblem infeasible after " + std::to_string(damp) + " damping steps");
        candidate *= 0.5;
        l = fp_update_l(candidate, model);
        ++trace.damping_events;
      }
      bisections += sub.iterations;
      candidate = sub.phi;
    }
    const double next = compute_snr(candidate, model);
    // Guard against round-off undoing the ascent guarantee.
    const bool improved = next >= snr;
    if (improved) phi = candidate;
    const double snr_new = improved ? next : snr;
    trace.l_history.push_back(l);
    trace.snr_history.push_back(linear_to_db(snr_new));
    trace.constraint_slack.push_back(budget - aris_power(phi, model));
    trace.inner_iterations.push_back(bisections);
    const double change = snr > 0.0 ? std::abs(snr_new - snr) / snr : std::abs(snr_new);
    snr = snr_new;
    if (!improved || change < options.tolerance) {
      trace.converged = true;
      break;
    }
  }

  if (options.align_phase) {
    const cd s = cascade_gain(phi, model.h_sr, model.h_rt);
    if (std::abs(s) > 0.0) phi *= std::conj(s) / std::abs(s);
  }
  SlotSolution out;
  out.phi = std::move(phi);
  out.snr = compute_snr(out.phi, model);
  out.power = aris_power(out.phi, model);
  out.trace = std::move(trace);
  return out;
}

CVector pris_baseline(const SnrModel& model) {
  CVector phi(model.h_sr.size());
  for (Eigen::Index i = 0; i < phi.size(); ++i) phi(i) = std::polar(1.0, -std::arg(model.h_sr(i) * model.h_rt(i)));
  return phi;
}

SnrModel pris_model(const SnrModel& model, double total_power) {
  SnrModel p = model;
  p.transmit_power = total_power;
  p.aris_noise_in = 0.0;
  p.aris_noise_out = 0.0;
  return p;
}

void write_trace_csv(std::ostream& os, const SolverTrace& trace) {
  os << "iteration,l,snr_db,power_slack_w,inner_iterations\n";
  char buf[160];
  for (std::size_t k = 0; k < trace.snr_history.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%d\n", k, trace.l_history[k], trace.snr_history[k],
                  trace.constraint_slack[k], trace.inner_iterations[k]);
    os << buf;
  }
}

}  // namespace arissar
