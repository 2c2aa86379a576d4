#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "modumech/common.hpp"
#include "modumech/fock.hpp"

namespace modumech {

// Physical rates in dimensionless units (hbar = 1). omega: LC frequency,
// Omega: mechanical frequency, g: nonlinear coupling, gamma: mechanical
// amplitude damping (used by the photon-pressure analytics only).
struct SystemParams {
  double omega = 0;
  double Omega = 0;
  double g = 0;
  double gamma = 0;

  void validate() const {
    if (!std::isfinite(omega) || !std::isfinite(Omega) || !std::isfinite(g) ||
        !std::isfinite(gamma))
      throw error("SystemParams: rates must be finite");
  }
};

// H = omega a†a + Omega b†b + g a†a (b + b†)
inline Operator hamiltonian(const SystemParams& p, const FockSpace& space) {
  p.validate();
  const int n = space.joint_dim();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (int na = 0; na < space.dim_a; ++na) {
    const int off = na * space.dim_b;
    for (int nb = 0; nb < space.dim_b; ++nb) {
      h(off + nb, off + nb) = p.omega * na + p.Omega * nb;
      if (nb + 1 < space.dim_b) {
        const double c = p.g * na * std::sqrt(double(nb + 1));
        h(off + nb, off + nb + 1) += c;
        h(off + nb + 1, off + nb) += c;
      }
    }
  }
  return {space, std::move(h)};
}

// exp(-i H t) by spectral decomposition of the Hermitian generator; unitary
// to rounding by construction.
inline Eigen::MatrixXcd expm_i_hermitian(const Eigen::MatrixXcd& h, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw convergence_error("eigensolver failed");
  const auto& v = es.eigenvectors();
  Eigen::VectorXcd phases(h.rows());
  for (int i = 0; i < h.rows(); ++i) phases(i) = std::polar(1.0, -es.eigenvalues()(i) * t);
  return v * phases.asDiagonal() * v.adjoint();
}

// Factor functions of the exact propagator:
//   lambda_x = (g/Omega) sin(Omega t)
//   lambda_p = (g/Omega) (1 - cos(Omega t))
//   mu       = (g^2/Omega) (t - sin(Omega t)/Omega)
// Series forms take over for |Omega t| << 1 so the Omega -> 0 limit is exact.
struct PropagatorFactors {
  double lambda_x = 0;
  double lambda_p = 0;
  double mu = 0;
  double t = 0;
};

namespace detail {

struct FactorValues {
  double lambda_x, lambda_p, mu;
};

inline FactorValues factor_values(double g, double Omega, double t) {
  const double wt = Omega * t;
  FactorValues f;
  if (std::abs(wt) > 1e-4) {
    f.lambda_x = (g / Omega) * std::sin(wt);
    f.lambda_p = (g / Omega) * (1.0 - std::cos(wt));
    f.mu = (g * g / Omega) * (t - std::sin(wt) / Omega);
  } else {
    // sin(wt)/Omega = t - Omega^2 t^3/6 + Omega^4 t^5/120 - ...
    f.lambda_x = g * t * (1.0 - wt * wt / 6.0 + wt * wt * wt * wt / 120.0);
    f.lambda_p = g * t * (wt / 2.0 - wt * wt * wt / 24.0);
    f.mu = g * g * (Omega * t * t * t / 6.0 - Omega * Omega * Omega * t * t * t * t * t / 120.0);
  }
  return f;
}

}  // namespace detail

inline PropagatorFactors propagator_factors(const SystemParams& p, double t) {
  if (p.Omega <= 0) throw error("propagator_factors: Omega must be positive");
  const auto f = detail::factor_values(p.g, p.Omega, t);
  return {f.lambda_x, f.lambda_p, f.mu, t};
}

// chi = g^2 / Omega
inline double kerr_rate(double g, double Omega) {
  if (Omega <= 0) throw error("kerr_rate: Omega must be positive");
  return g * g / Omega;
}

// Phase-space distance of the mechanics at t = pi/Omega, conditioned on the
// LC mode holding n photons: sqrt(8) (g/Omega) n.
inline double displacement_at_half_period(double g, double Omega, int n) {
  if (Omega <= 0) throw error("displacement_at_half_period: Omega must be positive");
  if (n < 0) throw error("displacement_at_half_period: n must be >= 0");
  return std::sqrt(8.0) * (g / Omega) * n;
}

namespace detail {

// Eigendecomposition of x = (b + b†)/sqrt(2) on a truncated mode space,
// shared by every displacement-operator application of that dimension.
struct MechBasis {
  Eigen::VectorXd xeig;
  Eigen::MatrixXcd vx;  // columns: eigenvectors (real, stored complex)
};

inline std::shared_ptr<const MechBasis> mech_basis(int dim) {
  static std::mutex mtx;
  static std::map<int, std::shared_ptr<const MechBasis>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(dim);
  if (it != cache.end()) return it->second;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd sub(dim - 1 > 0 ? dim - 1 : 0);
  for (int k = 0; k + 1 < dim; ++k) sub(k) = std::sqrt((k + 1) / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub);
  auto basis = std::make_shared<MechBasis>();
  basis->xeig = es.eigenvalues();
  basis->vx = es.eigenvectors().cast<cplx>();
  cache[dim] = basis;
  return basis;
}

// In-place D(beta) v with D(beta) = exp(beta b† - beta* b). Uses
// D(beta) = e^{i phi n} exp(-i sqrt(2)|beta| x) e^{-i phi n}, phi = arg(beta) + pi/2.
inline void apply_displacement(cplx beta, const MechBasis& basis, Eigen::VectorXcd& v,
                               Eigen::VectorXcd& scratch) {
  const double s = std::abs(beta);
  if (s == 0.0) return;
  const double phi = std::arg(beta) + pi / 2.0;
  const int dim = int(v.size());
  for (int k = 0; k < dim; ++k) v(k) *= std::polar(1.0, -phi * k);
  scratch.noalias() = basis.vx.adjoint() * v;
  const double c = std::sqrt(2.0) * s;
  for (int k = 0; k < dim; ++k) scratch(k) *= std::polar(1.0, -c * basis.xeig(k));
  v.noalias() = basis.vx * scratch;
  for (int k = 0; k < dim; ++k) v(k) *= std::polar(1.0, phi * k);
}

// Applies the constant-coefficient propagator exp(-i H(p) h) to a joint
// state, one photon-number block at a time:
//   U_n(h) = e^{-i omega n h} e^{i mu n^2} D(-n(lambda_p + i lambda_x)) e^{-i Omega b†b h}
inline void apply_constant_propagator(const SystemParams& p, double h,
                                      const FockSpace& space, Eigen::VectorXcd& psi,
                                      const MechBasis& basis, Eigen::VectorXcd& block,
                                      Eigen::VectorXcd& scratch) {
  const auto f = factor_values(p.g, p.Omega, h);
  const cplx beta1 = -cplx(f.lambda_p, f.lambda_x);
  for (int na = 0; na < space.dim_a; ++na) {
    block = psi.segment(na * space.dim_b, space.dim_b);
    for (int k = 0; k < space.dim_b; ++k) block(k) *= std::polar(1.0, -p.Omega * k * h);
    if (na > 0) apply_displacement(double(na) * beta1, basis, block, scratch);
    block *= std::polar(1.0, f.mu * na * na - p.omega * na * h);
    psi.segment(na * space.dim_b, space.dim_b) = block;
  }
}

}  // namespace detail

// Displacement operator exp(beta b† - beta* b) on a truncated mode space.
inline Eigen::MatrixXcd displacement_operator(cplx beta, int dim) {
  if (dim < 1) throw dimension_error("displacement_operator: dim must be >= 1");
  auto basis = detail::mech_basis(dim);
  Eigen::MatrixXcd out(dim, dim);
  Eigen::VectorXcd col, scratch(dim);
  for (int j = 0; j < dim; ++j) {
    col = Eigen::VectorXcd::Zero(dim);
    col(j) = 1.0;
    detail::apply_displacement(beta, *basis, col, scratch);
    out.col(j) = col;
  }
  return out;
}

// Exact propagator of H in factored form. Block-diagonal in photon number;
// block n carries the phase exp(-i omega n t + i mu n^2) times a mechanical
// displacement-and-rotation.
inline Operator analytic_propagator(const SystemParams& p, double t, const FockSpace& space) {
  if (p.Omega <= 0) throw error("analytic_propagator: Omega must be positive");
  p.validate();
  const auto f = detail::factor_values(p.g, p.Omega, t);
  const cplx beta1 = -cplx(f.lambda_p, f.lambda_x);
  const int jd = space.joint_dim();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(jd, jd);
  Eigen::VectorXcd rot(space.dim_b);
  for (int k = 0; k < space.dim_b; ++k) rot(k) = std::polar(1.0, -p.Omega * k * t);
  for (int na = 0; na < space.dim_a; ++na) {
    Eigen::MatrixXcd blockmat = displacement_operator(double(na) * beta1, space.dim_b);
    blockmat = blockmat * rot.asDiagonal();
    blockmat *= std::polar(1.0, f.mu * na * na - p.omega * na * t);
    u.block(na * space.dim_b, na * space.dim_b, space.dim_b, space.dim_b) = blockmat;
  }
  return {space, std::move(u)};
}

// Evolution over m full mechanical periods, tau = 2 pi m / Omega:
//   U(tau) = exp[-i (omega a†a + Omega b†b - (g^2/Omega)(a†a)^2) tau]
// (diagonal in the joint number basis; mechanics and LC factor exactly).
inline Operator kerr_propagator(const SystemParams& p, int m, const FockSpace& space) {
  if (p.Omega <= 0) throw error("kerr_propagator: Omega must be positive");
  if (m < 1) throw error("kerr_propagator: m must be a positive integer");
  const double tau = 2.0 * pi * m / p.Omega;
  const double chi = p.g * p.g / p.Omega;
  Eigen::VectorXcd d(space.joint_dim());
  for (int na = 0; na < space.dim_a; ++na)
    for (int nb = 0; nb < space.dim_b; ++nb)
      d(space.index(na, nb)) =
          std::polar(1.0, (-p.omega * na - p.Omega * nb + chi * na * na) * tau);
  return {space, Eigen::MatrixXcd(d.asDiagonal())};
}

// --- time-dependent schedules -------------------------------------------------

// (omega, Omega, g) as a function of time: constant, piecewise-constant
// segments, or a sampled-continuous function with a characteristic period
// that sets the integrator's step floor.
class Schedule {
 public:
  struct Segment {
    double duration;
    SystemParams params;
  };

  static Schedule constant(const SystemParams& p) {
    Schedule s;
    s.kind_ = Kind::Constant;
    s.const_params_ = p;
    return s;
  }

  static Schedule piecewise(std::vector<Segment> segments) {
    if (segments.empty()) throw error("Schedule::piecewise: no segments");
    for (const auto& seg : segments)
      if (!(seg.duration > 0)) throw error("Schedule::piecewise: segment durations must be > 0");
    Schedule s;
    s.kind_ = Kind::Piecewise;
    s.segments_ = std::move(segments);
    return s;
  }

  static Schedule sampled(std::function<SystemParams(double)> fn, double period_hint) {
    if (!(period_hint > 0)) throw error("Schedule::sampled: period hint must be > 0");
    Schedule s;
    s.kind_ = Kind::Sampled;
    s.fn_ = std::move(fn);
    s.period_hint_ = period_hint;
    return s;
  }

  SystemParams at(double t) const {
    switch (kind_) {
      case Kind::Constant:
        return const_params_;
      case Kind::Piecewise: {
        double acc = 0;
        for (const auto& seg : segments_) {
          acc += seg.duration;
          if (t < acc) return seg.params;
        }
        return segments_.back().params;
      }
      case Kind::Sampled:
        return fn_(t);
    }
    throw error("Schedule: invalid kind");
  }

  bool is_constant() const { return kind_ == Kind::Constant; }
  bool is_piecewise() const { return kind_ == Kind::Piecewise; }
  bool is_sampled() const { return kind_ == Kind::Sampled; }
  double period_hint() const { return period_hint_; }
  const std::vector<Segment>& segments() const { return segments_; }

 private:
  enum class Kind { Constant, Piecewise, Sampled };
  Kind kind_ = Kind::Constant;
  SystemParams const_params_;
  std::vector<Segment> segments_;
  std::function<SystemParams(double)> fn_;
  double period_hint_ = 0;
};

struct PropagationOptions {
  // Step-doubling convergence target: halving the step must change every
  // amplitude by less than amp_tol.
  double amp_tol = 1e-8;
  int min_steps_per_period = 200;
  long max_steps = 1 << 26;
  // Tail guard on the mechanical mode, checked while propagating; +inf
  // disables. The LC populations are constants of motion (H commutes with
  // a†a), so only the mechanics can leak toward its truncation boundary.
  double tail_tol = default_tail_tolerance;
  int tail_check_stride = 16;
};

namespace detail {

inline void tail_check_mechanics(const Eigen::VectorXcd& psi, const FockSpace& space,
                                 double tol) {
  double tail_b = 0;
  const int db = space.dim_b;
  for (int na = 0; na < space.dim_a; ++na) tail_b += std::norm(psi(na * db + db - 1));
  if (tail_b > tol)
    throw truncation_error("propagation: mechanics tail guard violated", tail_b);
}

// Midpoint-frozen propagation of a state with a fixed step count.
inline Eigen::VectorXcd propagate_fixed_steps(const Schedule& sched, double t,
                                              const FockSpace& space,
                                              const Eigen::VectorXcd& psi0, long steps,
                                              const PropagationOptions& opts) {
  auto basis = mech_basis(space.dim_b);
  Eigen::VectorXcd psi = psi0;
  Eigen::VectorXcd block(space.dim_b), scratch(space.dim_b);
  const double h = t / double(steps);
  const bool guard = std::isfinite(opts.tail_tol);
  for (long k = 0; k < steps; ++k) {
    const SystemParams p = sched.at((double(k) + 0.5) * h);
    apply_constant_propagator(p, h, space, psi, *basis, block, scratch);
    if (guard && (k % opts.tail_check_stride == 0 || k + 1 == steps))
      tail_check_mechanics(psi, space, opts.tail_tol);
  }
  return psi;
}

}  // namespace detail

// Propagates a state under a time-dependent schedule. Constant and
// piecewise-constant schedules use one exact exponential per segment;
// sampled schedules use midpoint-frozen exponentials with automatic step
// doubling until converged.
inline StateVector propagate_state(const Schedule& sched, const StateVector& psi0, double t,
                                   const PropagationOptions& opts = {}) {
  if (t < 0) throw error("propagate_state: negative time");
  const FockSpace& space = psi0.space;
  auto basis = detail::mech_basis(space.dim_b);
  Eigen::VectorXcd block(space.dim_b), scratch(space.dim_b);
  const bool guard = std::isfinite(opts.tail_tol);

  if (t == 0) return psi0;

  if (sched.is_constant()) {
    Eigen::VectorXcd psi = psi0.amps;
    detail::apply_constant_propagator(sched.at(0), t, space, psi, *basis, block, scratch);
    if (guard) detail::tail_check_mechanics(psi, space, opts.tail_tol);
    return {space, std::move(psi)};
  }

  if (sched.is_piecewise()) {
    Eigen::VectorXcd psi = psi0.amps;
    double remaining = t;
    for (const auto& seg : sched.segments()) {
      if (remaining <= 0) break;
      const double dt = std::min(seg.duration, remaining);
      detail::apply_constant_propagator(seg.params, dt, space, psi, *basis, block, scratch);
      if (guard) detail::tail_check_mechanics(psi, space, opts.tail_tol);
      remaining -= dt;
    }
    return {space, std::move(psi)};
  }

  // Sampled schedule: step-doubling ladder.
  long steps = std::max<long>(
      64, long(std::ceil(t / sched.period_hint() * opts.min_steps_per_period)));
  Eigen::VectorXcd coarse = detail::propagate_fixed_steps(sched, t, space, psi0.amps, steps, opts);
  while (true) {
    if (2 * steps > opts.max_steps)
      throw convergence_error(
          "propagate_state: step control did not converge within max_steps");
    Eigen::VectorXcd fine =
        detail::propagate_fixed_steps(sched, t, space, psi0.amps, 2 * steps, opts);
    const double diff = (fine - coarse).cwiseAbs().maxCoeff();
    coarse.swap(fine);
    steps *= 2;
    if (diff < opts.amp_tol) break;
  }
  return {space, std::move(coarse)};
}

// Full propagator matrix. Constant schedules go through one spectral
// exponential of the joint Hamiltonian (kept deliberately independent of the
// factored analytic route); piecewise schedules multiply exact segment
// exponentials; sampled schedules run the midpoint ladder on matrices and
// are intended for small spaces.
inline Operator numeric_propagator(const Schedule& sched, double t, const FockSpace& space,
                                   const PropagationOptions& opts = {}) {
  if (t < 0) throw error("numeric_propagator: negative time");
  const int jd = space.joint_dim();
  if (t == 0) return {space, Eigen::MatrixXcd::Identity(jd, jd)};

  if (sched.is_constant())
    return {space, expm_i_hermitian(hamiltonian(sched.at(0), space).mat, t)};

  if (sched.is_piecewise()) {
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(jd, jd);
    double remaining = t;
    for (const auto& seg : sched.segments()) {
      if (remaining <= 0) break;
      const double dt = std::min(seg.duration, remaining);
      u = expm_i_hermitian(hamiltonian(seg.params, space).mat, dt) * u;
      remaining -= dt;
    }
    return {space, std::move(u)};
  }

  auto run = [&](long steps) {
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(jd, jd);
    const double h = t / double(steps);
    for (long k = 0; k < steps; ++k) {
      const SystemParams p = sched.at((double(k) + 0.5) * h);
      u = expm_i_hermitian(hamiltonian(p, space).mat, h) * u;
    }
    return u;
  };
  long steps = std::max<long>(
      64, long(std::ceil(t / sched.period_hint() * opts.min_steps_per_period)));
  Eigen::MatrixXcd coarse = run(steps);
  while (true) {
    if (2 * steps > opts.max_steps)
      throw convergence_error(
          "numeric_propagator: step control did not converge within max_steps");
    Eigen::MatrixXcd fine = run(2 * steps);
    const double diff = (fine - coarse).cwiseAbs().maxCoeff();
    coarse.swap(fine);
    steps *= 2;
    if (diff < opts.amp_tol) break;
  }
  return {space, std::move(coarse)};
}

inline StateVector apply(const Operator& op, const StateVector& psi) {
  if (!(op.space == psi.space)) throw dimension_error("apply: operator/state space mismatch");
  return {psi.space, op.mat * psi.amps};
}

}  // namespace modumech
