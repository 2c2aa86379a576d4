#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <random>
#include <thread>
#include <vector>

#include "modumech/common.hpp"
#include "modumech/dynamics.hpp"
#include "modumech/fock.hpp"

namespace modumech {

// N-segment piecewise-constant controls (g_k, Omega_k) of total duration tau.
struct ControlSchedule {
  int segments = 1;
  double tau = 1.0;
  double g_max = pi;
  std::vector<double> g_values;
  std::vector<double> Omega_values;

  double segment_duration() const { return tau / segments; }

  void validate() const {
    if (segments < 1) throw error("ControlSchedule: need at least one segment");
    if (tau < 0) throw error("ControlSchedule: tau must be >= 0");
    if (int(g_values.size()) != segments || int(Omega_values.size()) != segments)
      throw error("ControlSchedule: value arrays must have one entry per segment");
    for (double g : g_values)
      if (g < -1e-12 || g > g_max + 1e-12)
        throw error("ControlSchedule: g outside [0, g_max]");
  }

  Schedule as_schedule() const {
    validate();
    std::vector<Schedule::Segment> segs;
    segs.reserve(size_t(segments));
    for (int k = 0; k < segments; ++k)
      segs.push_back({segment_duration(),
                      SystemParams{.omega = 0, .Omega = Omega_values[size_t(k)],
                                   .g = g_values[size_t(k)]}});
    return Schedule::piecewise(std::move(segs));
  }
};

struct OptimizeConfig {
  FockSpace space{3, 30};
  int segments = 10;
  double tau = 1.0;
  double g_max = pi;
  double Omega_min = 0.0;
  double Omega_max = 10.0 * pi;
  int restarts = 20;
  unsigned long long seed = 1;
  int max_iters = 3000;     // gradient evaluations per restart, both stages
  double target_epsilon = 1e-13;  // early stop once a restart reaches this
  int threads = 0;          // 0: hardware concurrency
  // LC input state: truncated coherent amplitude, or 0 for the equal
  // superposition of all retained number states.
  double input_alpha = 0.8;
};

struct OptimizationResult {
  ControlSchedule schedule;
  double fidelity = 0;
  double epsilon = 1;
  long iterations = 0;  // gradient evaluations summed over restarts
  int restarts_used = 0;
  unsigned long long seed = 0;
  bool converged = false;  // best restart hit target_epsilon or a stationary point
};

// Target (V x I)(psi_lc x |0>_b) with V|n> = exp(i pi n^2 / 2)|n>.
inline StateVector target_state(const Eigen::VectorXcd& psi_lc, const FockSpace& space) {
  if (psi_lc.size() != space.dim_a)
    throw dimension_error("target_state: LC state does not match space");
  Eigen::VectorXcd kerr = psi_lc;
  for (int n = 0; n < space.dim_a; ++n) kerr(n) *= std::polar(1.0, pi * n * n / 2.0);
  return product_state(kerr, vacuum(space.dim_b), space);
}

// Equal superposition of the retained number states.
inline Eigen::VectorXcd uniform_control_input(int dim_a) {
  Eigen::VectorXcd lc = Eigen::VectorXcd::Constant(dim_a, 1.0 / std::sqrt(double(dim_a)));
  return lc;
}

// Truncated coherent state renormalized on the retained LC levels. The
// truncation here is intentional (the dynamics is exactly block-diagonal in
// photon number), so no tail guard applies. Full support on every retained
// level keeps all Kerr phases constrained by the fidelity.
inline Eigen::VectorXcd coherent_control_input(double alpha, int dim_a) {
  Eigen::VectorXcd lc(dim_a);
  double w = 1.0;
  for (int n = 0; n < dim_a; ++n) {
    lc(n) = w;
    w *= alpha / std::sqrt(double(n + 1));
  }
  lc.normalize();
  return lc;
}

namespace detail {

// Per-segment, per-photon-block spectral data of
//   H_n = omega n + Omega b†b + g n (b + b†)   (real symmetric tridiagonal).
struct BlockEig {
  Eigen::VectorXd evals;
  Eigen::MatrixXd evecs;
};

inline BlockEig block_eig(int n, double Omega, double g, int dim_b) {
  Eigen::VectorXd diag(dim_b), sub(std::max(0, dim_b - 1));
  for (int k = 0; k < dim_b; ++k) diag(k) = Omega * k;
  for (int k = 0; k + 1 < dim_b; ++k) sub(k) = g * n * std::sqrt(double(k + 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub);
  if (es.info() != Eigen::Success) throw convergence_error("block eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

// Evolution and (optionally) the exact objective gradient of
//   F = |<target| U_N ... U_1 |psi0>|
// with U_k = exp(-i H_k tau/N). The derivative of each exponential uses the
// spectral (Loewner) form with the stable sinc expression
//   (e^{-ih a} - e^{-ih b})/(a - b) = -i h e^{-ih(a+b)/2} sinc(h(a-b)/2).
struct ObjectiveEval {
  double fidelity;
  cplx overlap;
  Eigen::VectorXd grad;  // [dF/dg_0.., dF/dOmega_0..], empty unless requested
};

inline ObjectiveEval evaluate_objective(const ControlSchedule& cs, const StateVector& psi0,
                                        const StateVector& target, double omega,
                                        bool want_grad) {
  cs.validate();
  if (!(psi0.space == target.space))
    throw dimension_error("objective: psi0 and target live on different spaces");
  const FockSpace& space = psi0.space;
  const int N = cs.segments, da = space.dim_a, db = space.dim_b;
  const double h = cs.segment_duration();

  std::vector<std::vector<BlockEig>> eig;
  eig.resize(size_t(N));
  for (int k = 0; k < N; ++k) {
    eig[size_t(k)].reserve(size_t(da));
    for (int n = 0; n < da; ++n)
      eig[size_t(k)].push_back(
          block_eig(n, cs.Omega_values[size_t(k)], cs.g_values[size_t(k)], db));
  }

  auto apply_segment = [&](int k, const Eigen::VectorXcd& in, bool forward) {
    Eigen::VectorXcd out(in.size());
    for (int n = 0; n < da; ++n) {
      const BlockEig& be = eig[size_t(k)][size_t(n)];
      Eigen::VectorXcd c = be.evecs.transpose().cast<cplx>() * in.segment(n * db, db);
      for (int j = 0; j < db; ++j) {
        const double phase = -(be.evals(j) + omega * n) * h;
        c(j) *= std::polar(1.0, forward ? phase : -phase);
      }
      out.segment(n * db, db) = be.evecs.cast<cplx>() * c;
    }
    return out;
  };

  // forward states psi_k = U_k ... U_1 psi0
  std::vector<Eigen::VectorXcd> fwd(size_t(N) + 1);
  fwd[0] = psi0.amps;
  for (int k = 0; k < N; ++k) fwd[size_t(k) + 1] = apply_segment(k, fwd[size_t(k)], true);

  const cplx overlap = target.amps.dot(fwd[size_t(N)]);
  ObjectiveEval out{std::abs(overlap), overlap, {}};
  if (!want_grad) return out;

  // backward states phi_k with <phi_k|psi_k> = overlap
  std::vector<Eigen::VectorXcd> bwd(size_t(N) + 1);
  bwd[size_t(N)] = target.amps;
  for (int k = N; k >= 1; --k) bwd[size_t(k) - 1] = apply_segment(k - 1, bwd[size_t(k)], false);

  out.grad = Eigen::VectorXd::Zero(2 * N);
  const double fid = std::max(out.fidelity, 1e-300);
  for (int k = 0; k < N; ++k) {
    cplx dc_g(0, 0), dc_w(0, 0);
    for (int n = 0; n < da; ++n) {
      const BlockEig& be = eig[size_t(k)][size_t(n)];
      const Eigen::MatrixXcd vt = be.evecs.transpose().cast<cplx>();
      const Eigen::VectorXcd a = vt * fwd[size_t(k)].segment(n * db, db);
      const Eigen::VectorXcd b = vt * bwd[size_t(k) + 1].segment(n * db, db);

      // dH/dOmega = b†b ; dH/dg = n (b + b†)
      Eigen::MatrixXd dH_w = Eigen::MatrixXd::Zero(db, db);
      for (int j = 0; j < db; ++j) dH_w(j, j) = j;
      Eigen::MatrixXd m_w = be.evecs.transpose() * dH_w * be.evecs;
      Eigen::MatrixXd m_g;
      if (n > 0) {
        Eigen::MatrixXd dH_g = Eigen::MatrixXd::Zero(db, db);
        for (int j = 0; j + 1 < db; ++j)
          dH_g(j, j + 1) = dH_g(j + 1, j) = n * std::sqrt(double(j + 1));
        m_g = be.evecs.transpose() * dH_g * be.evecs;
      }

      for (int i = 0; i < db; ++i)
        for (int j = 0; j < db; ++j) {
          const double mean = 0.5 * (be.evals(i) + be.evals(j)) + omega * n;
          const double half = 0.5 * h * (be.evals(i) - be.evals(j));
          const double sinc = (std::abs(half) < 1e-8) ? 1.0 : std::sin(half) / half;
          const cplx gfac = cplx(0, -h) * sinc * std::polar(1.0, -h * mean);
          const cplx w = std::conj(b(i)) * a(j) * gfac;
          dc_w += w * m_w(i, j);
          if (n > 0) dc_g += w * m_g(i, j);
        }
    }
    out.grad(k) = std::real(std::conj(overlap) * dc_g) / fid;
    out.grad(N + k) = std::real(std::conj(overlap) * dc_w) / fid;
  }
  return out;
}

}  // namespace detail

// F = |<target| U_N ... U_1 |psi0>| for the
// piecewise-constant schedule; omega is held fixed (0 = LC rotating frame).
inline double objective(const ControlSchedule& cs, const StateVector& psi0,
                        const StateVector& target, double omega = 0.0) {
  return detail::evaluate_objective(cs, psi0, target, omega, false).fidelity;
}

// Exact dF/dg_k and dF/dOmega_k (2N entries, g block first).
inline Eigen::VectorXd gradient(const ControlSchedule& cs, const StateVector& psi0,
                                const StateVector& target, double omega = 0.0) {
  return detail::evaluate_objective(cs, psi0, target, omega, true).grad;
}

namespace detail {

struct Box {
  Eigen::VectorXd lo, hi;
  void clamp(Eigen::VectorXd& x) const {
    x = x.cwiseMax(lo).cwiseMin(hi);
  }
  // zero out gradient components that push against an active bound
  Eigen::VectorXd project_grad(const Eigen::VectorXd& x, const Eigen::VectorXd& g) const {
    Eigen::VectorXd p = g;
    for (int i = 0; i < x.size(); ++i) {
      if (x(i) <= lo(i) + 1e-14 && g(i) > 0) p(i) = 0;  // ascent direction: -g
      if (x(i) >= hi(i) - 1e-14 && g(i) < 0) p(i) = 0;
    }
    return p;
  }
};

struct RestartOutcome {
  Eigen::VectorXd x;
  double epsilon = 1;
  long evals = 0;
  bool stationary = false;
};

// Minimizes eps(x) = 1 - F(x) inside a box: Adam exploration followed by a
// projected L-BFGS polish with Armijo backtracking.
template <typename Fn>
RestartOutcome minimize_restart(Fn&& eval, Eigen::VectorXd x, const Box& box,
                                int max_iters) {
  RestartOutcome best;
  box.clamp(x);

  auto record = [&](const Eigen::VectorXd& xi, double eps) {
    if (eps < best.epsilon) {
      best.epsilon = eps;
      best.x = xi;
    }
  };

  const int n = int(x.size());
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n), v = Eigen::VectorXd::Zero(n);
  const double lr = 0.08, b1 = 0.9, b2 = 0.999;
  const int adam_iters = max_iters / 2;
  double eps_prev = 2;
  int plateau = 0;

  Eigen::VectorXd grad(n);
  for (int it = 1; it <= adam_iters; ++it) {
    double eps;
    eval(x, eps, grad);
    ++best.evals;
    record(x, eps);
    if (eps < 1e-12) break;
    if (eps > eps_prev - 1e-14) {
      if (++plateau > 80) break;
    } else {
      plateau = 0;
    }
    eps_prev = eps;
    m = b1 * m + (1 - b1) * grad;
    v = b2 * v + (1 - b2) * grad.cwiseProduct(grad).eval();
    const double c1 = 1 - std::pow(b1, it), c2 = 1 - std::pow(b2, it);
    for (int i = 0; i < n; ++i)
      x(i) -= lr * (m(i) / c1) / (std::sqrt(v(i) / c2) + 1e-12);
    box.clamp(x);
  }

  // L-BFGS polish from the best Adam point
  x = best.x;
  const int mem = 10;
  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  Eigen::VectorXd g_cur(n), g_new(n);
  double eps_cur;
  eval(x, eps_cur, g_cur);
  ++best.evals;
  record(x, eps_cur);

  int remaining = max_iters - int(best.evals);
  for (int it = 0; it < remaining; ++it) {
    const Eigen::VectorXd pg = box.project_grad(x, g_cur);
    if (pg.lpNorm<Eigen::Infinity>() < 1e-13) {
      best.stationary = true;
      break;
    }
    // two-loop recursion
    Eigen::VectorXd q = pg;
    std::vector<double> alpha(s_hist.size());
    for (int i = int(s_hist.size()) - 1; i >= 0; --i) {
      alpha[size_t(i)] = rho_hist[size_t(i)] * s_hist[size_t(i)].dot(q);
      q -= alpha[size_t(i)] * y_hist[size_t(i)];
    }
    if (!s_hist.empty()) {
      const double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
    }
    for (size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd dir = -q;
    if (dir.dot(pg) > -1e-18 * dir.norm() * pg.norm()) {
      dir = -pg;  // not a descent direction: steepest descent restart
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    double step = 1.0;
    Eigen::VectorXd x_new;
    double eps_new = eps_cur;
    bool accepted = false;
    const double slope = dir.dot(pg);
    for (int ls = 0; ls < 30; ++ls) {
      x_new = x + step * dir;
      box.clamp(x_new);
      eval(x_new, eps_new, g_new);
      ++best.evals;
      record(x_new, eps_new);
      if (eps_new <= eps_cur + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
      if (int(best.evals) >= max_iters) break;
    }
    if (!accepted || int(best.evals) >= max_iters) break;

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g_cur;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (int(s_hist.size()) > mem) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x = x_new;
    g_cur = g_new;
    if (eps_new < 1e-15) break;
    eps_cur = eps_new;
  }
  return best;
}

}  // namespace detail

// Multi-restart gradient search for the schedule maximizing the Kerr-target
// fidelity. Restarts are independent (and run in parallel); the result is
// deterministic for a given seed.
inline OptimizationResult optimize(const OptimizeConfig& cfg) {
  if (cfg.segments < 1 || !(cfg.tau > 0) || cfg.g_max < 0 || cfg.restarts < 1)
    throw error("optimize: invalid configuration");
  const FockSpace space = cfg.space;
  const Eigen::VectorXcd lc_in = (cfg.input_alpha > 0)
                                     ? coherent_control_input(cfg.input_alpha, space.dim_a)
                                     : uniform_control_input(space.dim_a);
  const StateVector psi0 = product_state(lc_in, vacuum(space.dim_b), space);
  const StateVector target = target_state(lc_in, space);

  const int N = cfg.segments;
  detail::Box box;
  box.lo = Eigen::VectorXd::Zero(2 * N);
  box.hi = Eigen::VectorXd(2 * N);
  box.hi.head(N).setConstant(cfg.g_max);
  box.lo.tail(N).setConstant(cfg.Omega_min);
  box.hi.tail(N).setConstant(cfg.Omega_max);

  auto to_schedule = [&](const Eigen::VectorXd& x) {
    ControlSchedule cs;
    cs.segments = N;
    cs.tau = cfg.tau;
    cs.g_max = cfg.g_max;
    cs.g_values.assign(x.data(), x.data() + N);
    cs.Omega_values.assign(x.data() + N, x.data() + 2 * N);
    return cs;
  };

  // Restart pool: uniform random schedules interleaved with seeds near the
  // mechanical-decoupling resonance Omega ~ 2 pi/tau at strong coupling.
  // Plain uniform starts tend to collapse into the g -> 0 trap (killing the
  // residual entanglement zeroes the coupling gradient), so the resonant
  // family supplies starts on the productive side of that ridge.
  auto run_restart = [&](int idx) {
    std::seed_seq seq{unsigned(cfg.seed & 0xffffffffu), unsigned(cfg.seed >> 32),
                      unsigned(idx)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    Eigen::VectorXd x(2 * N);
    const double w_loop = 2.0 * pi / cfg.tau;
    switch (idx % 3) {
      case 0:  // uniform random
        for (int i = 0; i < N; ++i) x(i) = cfg.g_max * u01(rng);
        for (int i = 0; i < N; ++i)
          x(N + i) = cfg.Omega_min + (cfg.Omega_max - cfg.Omega_min) * u01(rng);
        break;
      case 1:  // near-resonant loop at strong coupling
        for (int i = 0; i < N; ++i) x(i) = cfg.g_max * (0.7 + 0.3 * u01(rng));
        for (int i = 0; i < N; ++i) x(N + i) = w_loop * (0.95 + 0.10 * u01(rng));
        break;
      default:  // broadly perturbed loop
        for (int i = 0; i < N; ++i) x(i) = cfg.g_max * (0.3 + 0.7 * u01(rng));
        for (int i = 0; i < N; ++i) x(N + i) = w_loop * (0.7 + 0.6 * u01(rng));
        break;
    }
    box.clamp(x);

    auto eval = [&](const Eigen::VectorXd& xv, double& eps, Eigen::VectorXd& grad) {
      const auto r = detail::evaluate_objective(to_schedule(xv), psi0, target, 0.0, true);
      eps = 1.0 - r.fidelity;
      grad = -r.grad;  // minimize eps
    };
    return detail::minimize_restart(eval, x, box, cfg.max_iters);
  };

  const int nthreads = cfg.threads > 0
                           ? cfg.threads
                           : std::max(1u, std::thread::hardware_concurrency());
  std::vector<detail::RestartOutcome> outcomes(size_t(cfg.restarts));
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int idx = next.fetch_add(1);
      if (idx >= cfg.restarts) break;
      outcomes[size_t(idx)] = run_restart(idx);
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  OptimizationResult res;
  res.seed = cfg.seed;
  res.restarts_used = cfg.restarts;
  int best_idx = 0;
  for (int i = 0; i < cfg.restarts; ++i) {
    res.iterations += outcomes[size_t(i)].evals;
    if (outcomes[size_t(i)].epsilon < outcomes[size_t(best_idx)].epsilon) best_idx = i;
  }
  const auto& best = outcomes[size_t(best_idx)];
  res.schedule = to_schedule(best.x);
  res.epsilon = best.epsilon;
  res.fidelity = 1.0 - best.epsilon;
  res.converged = best.stationary || best.epsilon <= cfg.target_epsilon;
  return res;
}

struct TauScanRow {
  double tau;
  int segments;
  double epsilon;
  long iterations;
  bool monotonic_ok;  // epsilon did not grow versus the previous (smaller) tau
};

// Best epsilon per tau, run at each segment count in n_list (two values by
// default so N itself can be ruled out as the fidelity limit).
inline std::vector<TauScanRow> tau_scan(const OptimizeConfig& base,
                                        const std::vector<double>& tau_list,
                                        const std::vector<int>& n_list = {10, 15}) {
  std::vector<TauScanRow> rows;
  for (int n_seg : n_list) {
    std::vector<double> taus = tau_list;
    std::sort(taus.begin(), taus.end());
    double prev_eps = std::numeric_limits<double>::infinity();
    for (double tau : taus) {
      OptimizeConfig cfg = base;
      cfg.tau = tau;
      cfg.segments = n_seg;
      const OptimizationResult r = optimize(cfg);
      const bool ok = r.epsilon <= prev_eps * 1.1 + 1e-12;
      rows.push_back({tau, n_seg, r.epsilon, r.iterations, ok});
      prev_eps = r.epsilon;
    }
  }
  return rows;
}

}  // namespace modumech
