#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>

#include "modumech/common.hpp"

namespace modumech {

// Truncated two-mode Fock space. Mode A is the LC oscillator, mode B the
// mechanics. Joint basis ordering is row-major in photon number:
//   index = n_a * dim_b + n_b
// so each fixed-n_a block is a contiguous slice of length dim_b.
struct FockSpace {
  int dim_a = 1;
  int dim_b = 1;

  FockSpace() = default;
  FockSpace(int da, int db) : dim_a(da), dim_b(db) {
    if (da < 1 || db < 1)
      throw dimension_error("FockSpace dimensions must be >= 1");
  }

  int joint_dim() const { return dim_a * dim_b; }
  int index(int na, int nb) const { return na * dim_b + nb; }
  std::pair<int, int> levels(int idx) const { return {idx / dim_b, idx % dim_b}; }

  friend bool operator==(const FockSpace& l, const FockSpace& r) {
    return l.dim_a == r.dim_a && l.dim_b == r.dim_b;
  }
};

enum class Mode { A, B };

// Operator on the joint space.
struct Operator {
  FockSpace space;
  Eigen::MatrixXcd mat;
};

// Normalized amplitude vector on the joint space.
struct StateVector {
  FockSpace space;
  Eigen::VectorXcd amps;

  double norm() const { return amps.norm(); }
};

// --- single-mode building blocks -------------------------------------------

inline Eigen::MatrixXcd annihilator(int dim) {
  if (dim < 1) throw dimension_error("annihilator: dim must be >= 1");
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

inline Eigen::MatrixXcd creator(int dim) { return annihilator(dim).adjoint(); }

inline Eigen::MatrixXcd number_operator(int dim) {
  if (dim < 1) throw dimension_error("number_operator: dim must be >= 1");
  Eigen::VectorXcd d(dim);
  for (int n = 0; n < dim; ++n) d(n) = double(n);
  return d.asDiagonal();
}

// x = (b + b†)/sqrt(2), p = -i (b - b†)/sqrt(2); [x, p] = i on the retained
// subspace (the last diagonal entry carries the truncation artifact).
inline std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> quadratures(int dim) {
  if (dim < 2) throw dimension_error("quadratures: dim must be >= 2");
  const Eigen::MatrixXcd b = annihilator(dim);
  const Eigen::MatrixXcd bd = b.adjoint();
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd x = s * (b + bd);
  Eigen::MatrixXcd p = cplx(0, -1) * s * (b - bd);
  return {x, p};
}

// --- joint-space embedding ---------------------------------------------------

inline Operator embed(const Eigen::MatrixXcd& op, Mode which, const FockSpace& space) {
  const int d = (which == Mode::A) ? space.dim_a : space.dim_b;
  if (op.rows() != d || op.cols() != d)
    throw dimension_error("embed: operator dimension does not match mode truncation");
  const int n = space.joint_dim();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  if (which == Mode::A) {
    for (int ia = 0; ia < space.dim_a; ++ia)
      for (int ja = 0; ja < space.dim_a; ++ja) {
        if (op(ia, ja) == cplx(0)) continue;
        for (int k = 0; k < space.dim_b; ++k)
          out(ia * space.dim_b + k, ja * space.dim_b + k) = op(ia, ja);
      }
  } else {
    for (int na = 0; na < space.dim_a; ++na)
      out.block(na * space.dim_b, na * space.dim_b, space.dim_b, space.dim_b) = op;
  }
  return {space, std::move(out)};
}

// --- states ------------------------------------------------------------------

inline Eigen::VectorXcd vacuum(int dim) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(0) = 1.0;
  return v;
}

inline Eigen::VectorXcd basis_vector(int level, int dim) {
  if (level < 0 || level >= dim) throw dimension_error("basis_vector: level outside space");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(level) = 1.0;
  return v;
}

inline constexpr double default_tail_tolerance = 1e-8;

// Coherent state truncated to dim levels, renormalized. Amplitudes are built
// in log space so large alpha / dim combinations do not overflow n!.
inline Eigen::VectorXcd coherent_state(cplx alpha, int dim,
                                       double tail_tol = default_tail_tolerance) {
  if (dim < 1) throw dimension_error("coherent_state: dim must be >= 1");
  Eigen::VectorXcd v(dim);
  const double a2 = std::norm(alpha);
  if (a2 == 0.0) return vacuum(dim);
  const double lna = 0.5 * std::log(a2);
  const double phase = std::arg(alpha);
  for (int n = 0; n < dim; ++n) {
    const double lnmag = -0.5 * a2 + n * lna - 0.5 * std::lgamma(double(n) + 1.0);
    v(n) = std::polar(std::exp(lnmag), phase * n);
  }
  const double tail = std::norm(v(dim - 1)) / v.squaredNorm();
  if (tail > tail_tol)
    throw truncation_error("coherent_state: amplitude does not fit truncation", tail);
  v.normalize();
  return v;
}

// (|alpha> - i|-alpha>)/sqrt(2), renormalized on the truncated space.
inline Eigen::VectorXcd cat_state(cplx alpha, int dim,
                                  double tail_tol = default_tail_tolerance) {
  const Eigen::VectorXcd plus = coherent_state(alpha, dim, tail_tol);
  const Eigen::VectorXcd minus = coherent_state(-alpha, dim, tail_tol);
  Eigen::VectorXcd v = (plus - cplx(0, 1) * minus) / std::sqrt(2.0);
  v.normalize();
  return v;
}

inline StateVector product_state(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b,
                                 const FockSpace& space) {
  if (a.size() != space.dim_a || b.size() != space.dim_b)
    throw dimension_error("product_state: factor dimensions do not match space");
  StateVector psi{space, Eigen::VectorXcd(space.joint_dim())};
  for (int na = 0; na < space.dim_a; ++na)
    psi.amps.segment(na * space.dim_b, space.dim_b) = a(na) * b;
  psi.amps.normalize();
  return psi;
}

inline StateVector basis_state(const FockSpace& space, int na, int nb) {
  if (na < 0 || na >= space.dim_a || nb < 0 || nb >= space.dim_b)
    throw dimension_error("basis_state: levels outside space");
  StateVector psi{space, Eigen::VectorXcd::Zero(space.joint_dim())};
  psi.amps(space.index(na, nb)) = 1.0;
  return psi;
}

// --- fidelity and diagnostics ------------------------------------------------

// Pure-state fidelity |<psi|phi>|, invariant under global phases.
inline double fidelity(const Eigen::VectorXcd& psi, const Eigen::VectorXcd& phi) {
  if (psi.size() != phi.size()) throw dimension_error("fidelity: state dimensions differ");
  return std::abs(psi.dot(phi));
}

inline double fidelity(const StateVector& psi, const StateVector& phi) {
  if (!(psi.space == phi.space)) throw dimension_error("fidelity: spaces differ");
  return std::abs(psi.amps.dot(phi.amps));
}

// Marginal photon-number distribution of one mode.
inline Eigen::VectorXd mode_populations(const StateVector& psi, Mode which) {
  const auto& s = psi.space;
  const int d = (which == Mode::A) ? s.dim_a : s.dim_b;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
  for (int na = 0; na < s.dim_a; ++na)
    for (int nb = 0; nb < s.dim_b; ++nb) {
      const double w = std::norm(psi.amps(s.index(na, nb)));
      p((which == Mode::A) ? na : nb) += w;
    }
  return p;
}

struct TailReport {
  double tail_a = 0;
  double tail_b = 0;
  double max() const { return tail_a > tail_b ? tail_a : tail_b; }
};

inline TailReport tail_populations(const StateVector& psi) {
  TailReport r;
  r.tail_a = mode_populations(psi, Mode::A)(psi.space.dim_a - 1);
  r.tail_b = mode_populations(psi, Mode::B)(psi.space.dim_b - 1);
  return r;
}

inline void check_tail(const StateVector& psi, double tol = default_tail_tolerance) {
  const TailReport r = tail_populations(psi);
  if (r.max() > tol)
    throw truncation_error("tail guard: highest retained Fock level populated", r.max());
}

inline void check_norm(const StateVector& psi, double tol = 1e-10) {
  const double dev = std::abs(psi.norm() - 1.0);
  if (dev > tol)
    throw error("state norm deviates from unity by " + std::to_string(dev));
}

// Reduced density matrix of the LC mode, rho_A = Tr_B |psi><psi|.
inline Eigen::MatrixXcd reduced_density_a(const StateVector& psi) {
  const auto& s = psi.space;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(s.dim_a, s.dim_a);
  for (int ia = 0; ia < s.dim_a; ++ia)
    for (int ja = 0; ja < s.dim_a; ++ja)
      for (int k = 0; k < s.dim_b; ++k)
        rho(ia, ja) += psi.amps(s.index(ia, k)) * std::conj(psi.amps(s.index(ja, k)));
  return rho;
}

inline Eigen::MatrixXcd reduced_density_b(const StateVector& psi) {
  const auto& s = psi.space;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(s.dim_b, s.dim_b);
  for (int ib = 0; ib < s.dim_b; ++ib)
    for (int jb = 0; jb < s.dim_b; ++jb)
      for (int k = 0; k < s.dim_a; ++k)
        rho(ib, jb) += psi.amps(s.index(k, ib)) * std::conj(psi.amps(s.index(k, jb)));
  return rho;
}

// Fidelity of a density matrix against a pure target: sqrt(<phi|rho|phi>).
inline double fidelity_with_pure(const Eigen::MatrixXcd& rho, const Eigen::VectorXcd& phi) {
  if (rho.rows() != phi.size()) throw dimension_error("fidelity_with_pure: dimensions differ");
  const double f2 = std::real(phi.dot(rho * phi));
  return std::sqrt(std::max(0.0, f2));
}

// Entanglement entropy (von Neumann, natural log) across the A|B cut.
inline double entanglement_entropy(const StateVector& psi) {
  const auto& s = psi.space;
  Eigen::MatrixXcd m(s.dim_a, s.dim_b);
  for (int na = 0; na < s.dim_a; ++na)
    for (int nb = 0; nb < s.dim_b; ++nb) m(na, nb) = psi.amps(s.index(na, nb));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  double entropy = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    const double p = svd.singularValues()(i) * svd.singularValues()(i);
    if (p > 1e-300) entropy -= p * std::log(p);
  }
  return entropy;
}

// Expectation value of a (Hermitian) single-mode operator in a mode state.
inline double expectation(const Eigen::MatrixXcd& op, const Eigen::VectorXcd& v) {
  return std::real(v.dot(op * v));
}

inline bool is_hermitian(const Eigen::MatrixXcd& m, double tol = 1e-12) {
  const double scale = m.cwiseAbs().maxCoeff();
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, scale);
}

inline double unitarity_defect(const Eigen::MatrixXcd& u) {
  const Eigen::MatrixXcd d =
      u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

}  // namespace modumech
