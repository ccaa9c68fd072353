#pragma once

// Complex vector/matrix kernel: pure states as canonical representatives of
// points in CP^d, product plays, tensor products, slot contractions,
// unitary evolution and seeded Haar sampling.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qnash/config.hpp"
#include "qnash/errors.hpp"

namespace qnash {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline double max_abs_entry(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(const CVector& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (!std::isfinite(v[k].real()) || !std::isfinite(v[k].imag())) return false;
  return true;
}

class PureState;
PureState canonicalize_phase(const CVector& v, const Tolerances& tol = kDefaultTolerances);

// A unit vector whose first significant amplitude is real and positive.
// Two PureStates describe the same point of CP^d iff their amplitudes agree
// componentwise (within Tolerances::projective_equal).
class PureState {
 public:
  const CVector& amplitudes() const { return amplitudes_; }
  std::size_t dimension() const { return static_cast<std::size_t>(amplitudes_.size()); }
  Complex operator[](std::size_t k) const { return amplitudes_[static_cast<Eigen::Index>(k)]; }

  bool projectively_equal(const PureState& other,
                          double tol = kDefaultTolerances.projective_equal) const {
    if (dimension() != other.dimension()) return false;
    return (amplitudes_ - other.amplitudes_).cwiseAbs().maxCoeff() <= tol;
  }

  // Exact equality of the stored representative (used for round-trip checks).
  friend bool operator==(const PureState& a, const PureState& b) {
    return a.amplitudes_.size() == b.amplitudes_.size() && a.amplitudes_ == b.amplitudes_;
  }

 private:
  explicit PureState(CVector v) : amplitudes_(std::move(v)) {}
  friend PureState canonicalize_phase(const CVector& v, const Tolerances& tol);

  CVector amplitudes_;
};

// Normalizes v and rotates its global phase so the first amplitude with
// modulus above the significance threshold is real positive. Already
// canonical unit vectors pass through bit-for-bit.
inline PureState canonicalize_phase(const CVector& v, const Tolerances& tol) {
  if (v.size() < 1) throw DimensionError("canonicalize_phase: empty vector");
  if (!all_finite(v)) throw InvariantError("canonicalize_phase: non-finite amplitude");
  const double norm = v.norm();
  if (norm < tol.significant_amplitude)
    throw InvariantError("canonicalize_phase: zero vector has no projective class");

  CVector out = v;
  if (std::abs(norm - 1.0) > 1e-15) out /= norm;

  Eigen::Index lead = 0;
  while (lead < out.size() && std::abs(out[lead]) <= tol.significant_amplitude) ++lead;
  if (lead == out.size()) lead = 0;

  const Complex a = out[lead];
  if (!(a.imag() == 0.0 && a.real() > 0.0)) {
    const Complex phase = a / std::abs(a);
    out *= std::conj(phase);
    out[lead] = Complex(std::abs(a), 0.0);
  }
  return PureState(std::move(out));
}

inline PureState basis_state(std::size_t d, std::size_t k) {
  if (d < 1 || k >= d) throw DimensionError("basis_state: index out of range");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(d));
  v[static_cast<Eigen::Index>(k)] = 1.0;
  return canonicalize_phase(v);
}

inline PureState make_state(std::initializer_list<Complex> amps) {
  CVector v(static_cast<Eigen::Index>(amps.size()));
  Eigen::Index k = 0;
  for (auto a : amps) v[k++] = a;
  return canonicalize_phase(v);
}

class UnitaryOperator {
 public:
  static UnitaryOperator checked(CMatrix m, const Tolerances& tol = kDefaultTolerances) {
    if (m.rows() != m.cols() || m.rows() < 1)
      throw DimensionError("unitary: matrix must be square and nonempty");
    const double defect =
        max_abs_entry(m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols()));
    if (!(defect <= tol.unitary))
      throw InvariantError("unitarity: max |U^dagger U - I| = " + std::to_string(defect));
    return UnitaryOperator(std::move(m));
  }
  static UnitaryOperator identity(std::size_t d) {
    return UnitaryOperator(CMatrix::Identity(static_cast<Eigen::Index>(d),
                                             static_cast<Eigen::Index>(d)));
  }

  const CMatrix& matrix() const { return m_; }
  std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }
  UnitaryOperator adjoint() const { return UnitaryOperator(m_.adjoint()); }
  UnitaryOperator operator*(const UnitaryOperator& rhs) const {
    if (dimension() != rhs.dimension()) throw DimensionError("unitary product: size mismatch");
    return UnitaryOperator(m_ * rhs.m_);
  }
  friend bool operator==(const UnitaryOperator& a, const UnitaryOperator& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  explicit UnitaryOperator(CMatrix m) : m_(std::move(m)) {}
  CMatrix m_;
};

class HermitianOperator {
 public:
  static HermitianOperator checked(CMatrix m, const Tolerances& tol = kDefaultTolerances) {
    if (m.rows() != m.cols() || m.rows() < 1)
      throw DimensionError("hermitian: matrix must be square and nonempty");
    const double defect = max_abs_entry(m - m.adjoint());
    if (!(defect <= tol.hermitian))
      throw InvariantError("hermiticity: max |H - H^dagger| = " + std::to_string(defect));
    return HermitianOperator(std::move(m));
  }

  const CMatrix& matrix() const { return m_; }
  std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }
  friend bool operator==(const HermitianOperator& a, const HermitianOperator& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  explicit HermitianOperator(CMatrix m) : m_(std::move(m)) {}
  CMatrix m_;
};

// One PureState per player.
class ProductPlay {
 public:
  ProductPlay() = default;
  explicit ProductPlay(std::vector<PureState> factors) : factors_(std::move(factors)) {}

  std::size_t size() const { return factors_.size(); }
  const PureState& operator[](std::size_t i) const { return factors_.at(i); }
  const std::vector<PureState>& factors() const { return factors_; }

  std::vector<std::size_t> dims() const {
    std::vector<std::size_t> d;
    d.reserve(factors_.size());
    for (const auto& f : factors_) d.push_back(f.dimension());
    return d;
  }

  ProductPlay with_factor(std::size_t i, PureState s) const {
    if (i >= factors_.size()) throw DimensionError("with_factor: player index out of range");
    if (s.dimension() != factors_[i].dimension())
      throw DimensionError("with_factor: dimension mismatch");
    ProductPlay copy = *this;
    copy.factors_[i] = std::move(s);
    return copy;
  }

  friend bool operator==(const ProductPlay& a, const ProductPlay& b) {
    return a.factors_ == b.factors_;
  }

 private:
  std::vector<PureState> factors_;
};

inline std::size_t joint_dimension(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

// ⟨a, b⟩ = Σ conj(a_j) b_j.
inline Complex inner_product(const CVector& a, const CVector& b) {
  if (a.size() != b.size())
    throw DimensionError("inner_product: dimensions " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  return a.dot(b);
}

inline Complex inner_product(const PureState& a, const PureState& b) {
  return inner_product(a.amplitudes(), b.amplitudes());
}

// Kronecker product; the first factor is the most significant index.
inline CVector tensor_product(std::span<const CVector> factors) {
  if (factors.empty()) throw DimensionError("tensor_product: empty sequence");
  CVector out = CVector::Ones(1);
  for (const auto& f : factors) {
    if (f.size() < 1) throw DimensionError("tensor_product: empty factor");
    CVector next(out.size() * f.size());
    for (Eigen::Index a = 0; a < out.size(); ++a)
      next.segment(a * f.size(), f.size()) = out[a] * f;
    out = std::move(next);
  }
  return out;
}

inline CVector tensor_product(const ProductPlay& play) {
  std::vector<CVector> f;
  f.reserve(play.size());
  for (const auto& s : play.factors()) f.push_back(s.amplitudes());
  return tensor_product(f);
}

inline CVector apply_unitary(const UnitaryOperator& u, const CVector& v) {
  if (static_cast<std::size_t>(v.size()) != u.dimension())
    throw DimensionError("apply_unitary: dimension mismatch");
  return u.matrix() * v;
}

// The D×d_i matrix P with P·q = tensor_product(play with slot i replaced by q).
inline CMatrix slot_embedding(const ProductPlay& play, std::size_t i) {
  if (i >= play.size()) throw DimensionError("slot_embedding: player index out of range");
  const auto dims = play.dims();
  const std::size_t total = joint_dimension(dims);
  const std::size_t di = dims[i];

  CMatrix p = CMatrix::Zero(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(di));
  std::vector<std::size_t> digit(dims.size(), 0);
  for (std::size_t joint = 0; joint < total; ++joint) {
    Complex w = 1.0;
    for (std::size_t j = 0; j < dims.size(); ++j)
      if (j != i) w *= play[j][digit[j]];
    p(static_cast<Eigen::Index>(joint), static_cast<Eigen::Index>(digit[i])) = w;
    for (std::size_t j = dims.size(); j-- > 0;) {
      if (++digit[j] < dims[j]) break;
      digit[j] = 0;
    }
  }
  return p;
}

// v_i with ⟨target, ⊗(play | slot i = q)⟩ = ⟨v_i, q⟩ for every q.
inline CVector partial_contraction(const CVector& target, const ProductPlay& play, std::size_t i) {
  if (i >= play.size()) throw DimensionError("partial_contraction: player index out of range");
  const auto dims = play.dims();
  if (static_cast<std::size_t>(target.size()) != joint_dimension(dims))
    throw DimensionError("partial_contraction: target dimension does not match play");
  return slot_embedding(play, i).adjoint() * target;
}

// Fubini-Study distance arccos|⟨p,q⟩|, evaluated in the atan2 form so it
// stays accurate near 0 and π/2.
inline double fubini_study_distance(const CVector& p, const CVector& q) {
  const Complex overlap = inner_product(p, q);
  const double c = std::min(1.0, std::abs(overlap));
  const double s = (q - overlap * p).norm();
  return std::atan2(s, c);
}

inline double fubini_study_distance(const PureState& p, const PureState& q) {
  return fubini_study_distance(p.amplitudes(), q.amplitudes());
}

// exp(-i H t) through the Hermitian eigendecomposition.
inline UnitaryOperator matrix_exponential_unitary(const HermitianOperator& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h.matrix());
  if (eig.info() != Eigen::Success) throw Error("matrix_exponential_unitary: eigensolver failed");
  const CMatrix& v = eig.eigenvectors();
  CVector phases(v.cols());
  for (Eigen::Index k = 0; k < v.cols(); ++k)
    phases[k] = std::exp(Complex(0.0, -eig.eigenvalues()[k] * t));
  CMatrix u = v * phases.asDiagonal() * v.adjoint();
  return UnitaryOperator::checked(std::move(u));
}

struct Eigenpair {
  double value;
  PureState vector;
};

// Extremal eigenpair with a basis-independent tie rule: inside a degenerate
// eigenspace, return the projection of the lowest-index basis vector that
// has a non-negligible component there.
inline Eigenpair extremal_eigenpair(const CMatrix& hermitian, bool largest,
                                    const Tolerances& tol = kDefaultTolerances) {
  const CMatrix sym = 0.5 * (hermitian + hermitian.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(sym);
  if (eig.info() != Eigen::Success) throw Error("extremal_eigenpair: eigensolver failed");
  const auto& vals = eig.eigenvalues();
  const Eigen::Index n = vals.size();
  const double target = largest ? vals[n - 1] : vals[0];
  const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());

  std::vector<Eigen::Index> cluster;
  for (Eigen::Index k = 0; k < n; ++k)
    if (std::abs(vals[k] - target) <= tol.eigen_degeneracy * scale) cluster.push_back(k);

  CMatrix basis(n, static_cast<Eigen::Index>(cluster.size()));
  for (std::size_t c = 0; c < cluster.size(); ++c)
    basis.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(cluster[c]);

  for (Eigen::Index k = 0; k < n; ++k) {
    CVector proj = basis * basis.row(k).adjoint();
    if (proj.norm() > 1e-6) return {target, canonicalize_phase(proj, tol)};
  }
  return {target, canonicalize_phase(basis.col(0), tol)};
}

inline PureState haar_random_state(std::size_t d, Rng& rng) {
  if (d < 2) throw DimensionError("haar_random_state: dimension must be at least 2");
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    v[k] = Complex(re, im);
  }
  return canonicalize_phase(v);
}

inline PureState haar_random_state(std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  return haar_random_state(d, rng);
}

// QR of a complex Ginibre matrix with the R-diagonal phases folded back in.
inline UnitaryOperator haar_random_unitary(std::size_t d, Rng& rng) {
  if (d < 1) throw DimensionError("haar_random_unitary: empty dimension");
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(d);
  CMatrix z(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(r, c) = Complex(re, im);
    }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex diag = r(k, k);
    if (std::abs(diag) > 0) q.col(k) *= diag / std::abs(diag);
  }
  return UnitaryOperator::checked(std::move(q));
}

inline ProductPlay haar_random_play(std::span<const std::size_t> dims, Rng& rng) {
  std::vector<PureState> f;
  f.reserve(dims.size());
  for (auto d : dims) f.push_back(haar_random_state(d, rng));
  return ProductPlay(std::move(f));
}

// A few fixed gates used by builders, demos and tests.
namespace gates {

inline CMatrix hadamard() {
  CMatrix h(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  h << r, r, r, -r;
  return h;
}

inline CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

inline CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// Control is the first (most significant) qubit.
inline CMatrix cnot() {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = 1;
  m(2, 3) = m(3, 2) = 1;
  return m;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

// CNOT·(H⊗I): maps |00⟩ to (|00⟩+|11⟩)/√2.
inline UnitaryOperator bell_preparation() {
  return UnitaryOperator::checked(cnot() * kron(hadamard(), CMatrix::Identity(2, 2)));
}

}  // namespace gates

}  // namespace qnash
