#pragma once

// Builders for concrete games: state preparation with overlap payoffs,
// Grover search as a game against Nature, and the adiabatic interpolation
// game H(s) = s·H_I + (1-s)·H_f, plus the bundled demo instances.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qnash/classical.hpp"
#include "qnash/config.hpp"
#include "qnash/errors.hpp"
#include "qnash/quantum.hpp"
#include "qnash/tensor.hpp"

namespace qnash {

inline QuantumGame build_state_preparation_game(std::vector<std::size_t> dims, UnitaryOperator q,
                                                std::vector<PureState> targets) {
  if (targets.size() != dims.size())
    throw DimensionError("state preparation: one target per player required");
  std::vector<PayoffSpec> payoffs;
  for (auto& t : targets) payoffs.emplace_back(OverlapPayoff{std::move(t)});
  return QuantumGame(std::move(dims), std::move(q), std::move(payoffs));
}

// Normalized projection of the uniform superposition onto the orthogonal
// complement of `excluded`. If the uniform state is excluded itself, the
// lowest-index basis vector with a nonzero projection is used instead.
inline PureState complement_target(const PureState& excluded) {
  const auto d = static_cast<Eigen::Index>(excluded.dimension());
  const CVector& g = excluded.amplitudes();
  auto project = [&](const CVector& v) { return CVector(v - g * g.dot(v)); };
  CVector u = project(CVector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d))));
  if (u.norm() > 1e-9) return canonicalize_phase(u);
  for (Eigen::Index k = 0; k < d; ++k) {
    CVector e = CVector::Zero(d);
    e[k] = 1.0;
    u = project(e);
    if (u.norm() > 1e-9) return canonicalize_phase(u);
  }
  throw DegenerateInputError("complement_target: no orthogonal complement");
}

// One Grover iterate D·O: O flips the sign of |target⟩, D reflects about the
// uniform superposition.
inline UnitaryOperator grover_iterate(std::size_t n_qubits, std::size_t target_index) {
  if (n_qubits < 1 || n_qubits > 10) throw DimensionError("grover: qubit count out of range");
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  if (target_index >= static_cast<std::size_t>(dim)) throw DimensionError("grover: target out of range");
  CMatrix oracle = CMatrix::Identity(dim, dim);
  oracle(static_cast<Eigen::Index>(target_index), static_cast<Eigen::Index>(target_index)) = -1.0;
  const CVector s = CVector::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  const CMatrix diffusion = 2.0 * s * s.adjoint() - CMatrix::Identity(dim, dim);
  return UnitaryOperator::checked(diffusion * oracle);
}

struct QubitSplit {
  std::size_t player_qubits = 1;  // x
  std::size_t nature_qubits = 1;  // y
};

// Player 1 holds the first x qubits and prefers |target⟩; Nature holds the
// remaining y qubits and prefers the uniform superposition of every other
// basis state.
inline QuantumGame build_grover_game(std::size_t n_qubits, std::size_t target_index, QubitSplit split,
                                     std::size_t iterations = 1) {
  if (split.player_qubits < 1 || split.nature_qubits < 1 ||
      split.player_qubits + split.nature_qubits != n_qubits)
    throw DimensionError("grover: split must satisfy x >= 1, y >= 1, x + y = n");
  if (iterations < 1) throw DimensionError("grover: at least one iterate required");
  const UnitaryOperator step = grover_iterate(n_qubits, target_index);
  UnitaryOperator q = step;
  for (std::size_t k = 1; k < iterations; ++k) q = step * q;
  const std::size_t dim = std::size_t{1} << n_qubits;
  const PureState target = basis_state(dim, target_index);
  return build_state_preparation_game(
      {std::size_t{1} << split.player_qubits, std::size_t{1} << split.nature_qubits}, std::move(q),
      {target, complement_target(target)});
}

struct AdiabaticSchedule {
  std::vector<std::size_t> dims;  // qudit split between player I and player II
  HermitianOperator h_initial;
  HermitianOperator h_final;
  std::vector<double> s_values;
  double t = 1.0;

  void validate() const {
    if (dims.size() < 2) throw DimensionError("adiabatic schedule: at least two players required");
    if (h_initial.dimension() != h_final.dimension())
      throw DimensionError("adiabatic schedule: Hamiltonians differ in dimension");
    if (joint_dimension(dims) != h_final.dimension())
      throw DimensionError("adiabatic schedule: dims do not match the Hamiltonian dimension");
    for (std::size_t k = 0; k < s_values.size(); ++k) {
      if (!(s_values[k] >= 0.0 && s_values[k] <= 1.0))
        throw InvariantError("adiabatic schedule: s values must lie in [0, 1]");
      if (k > 0 && s_values[k] < s_values[k - 1])
        throw InvariantError("adiabatic schedule: s values must be sorted ascending");
    }
    if (!std::isfinite(t)) throw InvariantError("adiabatic schedule: evolution time must be finite");
  }

  friend bool operator==(const AdiabaticSchedule&, const AdiabaticSchedule&) = default;
};

inline PureState ground_state(const HermitianOperator& h) {
  return extremal_eigenpair(h.matrix(), false).vector;
}

inline UnitaryOperator interpolated_unitary(const AdiabaticSchedule& schedule, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw InvariantError("adiabatic game: s must lie in [0, 1]");
  const CMatrix h = s * schedule.h_initial.matrix() + (1.0 - s) * schedule.h_final.matrix();
  return matrix_exponential_unitary(HermitianOperator::checked(h), schedule.t);
}

// Player I prefers the ground state of H_f, player II its complement;
// `targets` overrides both.
inline QuantumGame build_adiabatic_game(const AdiabaticSchedule& schedule, double s,
                                        std::optional<std::vector<PureState>> targets = std::nullopt) {
  schedule.validate();
  if (!targets) {
    const PureState g = ground_state(schedule.h_final);
    targets = std::vector<PureState>{g, complement_target(g)};
  }
  return build_state_preparation_game(schedule.dims, interpolated_unitary(schedule, s),
                                      std::move(*targets));
}

struct SweepRow {
  double s = 0.0;
  std::size_t start_id = 0;
  std::string outcome;
  std::size_t iterations = 0;
  Complex payoff_player1;
  double ground_overlap_magnitude = 0.0;
  bool verified = false;  // converged and ε-Nash at the sweep epsilon
};

struct SweepOptions {
  std::size_t starts_per_s = 20;
  double tol = 1e-10;
  std::size_t max_iter = 500;
  double epsilon = 1e-6;
  std::size_t probes = 0;
  std::uint64_t seed = 0;
};

// Start plays depend only on (seed, start_id), so every s sees the same
// starts.
inline ProductPlay sweep_start(const std::vector<std::size_t>& dims, std::uint64_t seed,
                               std::size_t start_id) {
  Rng rng(seed + 0x9E3779B97F4A7C15ULL * (start_id + 1));
  return haar_random_play(dims, rng);
}

inline std::vector<SweepRow> sweep_adiabatic(const AdiabaticSchedule& schedule,
                                             const SweepOptions& opt = {}) {
  schedule.validate();
  const PureState ground = ground_state(schedule.h_final);
  std::vector<SweepRow> rows;
  for (double s : schedule.s_values) {
    const QuantumGame game = build_adiabatic_game(schedule, s);
    for (std::size_t k = 0; k < opt.starts_per_s; ++k) {
      const auto outcome = iterated_best_response(game, sweep_start(game.dims(), opt.seed, k),
                                                  {.tol = opt.tol, .max_iter = opt.max_iter});
      const ProductPlay& play = outcome.final_play();
      SweepRow row;
      row.s = s;
      row.start_id = k;
      row.outcome = outcome.kind();
      row.iterations = outcome.iterations();
      row.payoff_player1 = payoff_value(game, play, 0);
      row.ground_overlap_magnitude = std::abs(inner_product(ground.amplitudes(), prepared_vector(game, play)));
      row.verified = outcome.converged() &&
                     accepted(verify_epsilon_nash_quantum(game, play, opt.epsilon, opt.probes, opt.seed + k));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Bundled instances

namespace demos {

inline FiniteGame matching_pennies() {
  Eigen::MatrixXd a(2, 2);
  a << 1, -1, -1, 1;
  return FiniteGame::bimatrix(a, -a);
}

// Strategy 0 = Cooperate, 1 = Defect.
inline FiniteGame prisoners_dilemma() {
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 3, 0, 5, 1;
  b << 3, 5, 0, 1;
  return FiniteGame::bimatrix(a, b);
}

inline PureState bell_state() {
  CVector v = CVector::Zero(4);
  v[0] = v[3] = 1.0 / std::sqrt(2.0);
  return canonicalize_phase(v);
}

// Both players want (|00⟩+|11⟩)/√2 from Q = CNOT·(H⊗I).
inline QuantumGame bell_preparation_game() {
  return build_state_preparation_game({2, 2}, gates::bell_preparation(), {bell_state(), bell_state()});
}

// Q = (H⊗I)·CNOT measures in the Bell basis: |00⟩,|01⟩,|10⟩,|11⟩ read out
// Φ+, Ψ+, Φ-, Ψ-.
inline UnitaryOperator bell_measurement() { return gates::bell_preparation().adjoint(); }

// Zero-sum observable game. Player 1 scores e = (1, 1, 1, -3), the
// spectrum of X⊗X + Y⊗Y + Z⊗Z in the Bell basis, so its payoff is the
// Bloch-vector dot product n_1·n_2; player 2 scores the negative. Player 1
// wants aligned Bloch vectors, player 2 anti-aligned ones, and no pure
// equilibrium exists.
inline QuantumGame observable_demo_game() {
  return QuantumGame({2, 2}, bell_measurement(),
                     {ObservablePayoff{{1, 1, 1, -3}}, ObservablePayoff{{-1, -1, -1, 3}}});
}

// The same mechanism with overlap payoffs: both players target the readout
// |00⟩, i.e. the Bell state Φ+ before measurement.
inline QuantumGame observable_demo_overlap_twin() {
  return build_state_preparation_game({2, 2}, bell_measurement(), {basis_state(4, 0), basis_state(4, 0)});
}

// Explicit failure of linearity for observable payoffs: player 0's slot
// holds r = |0⟩ or s = |1⟩ against |1⟩, Q = I, e = (0,0,0,1).
struct NonlinearityWitness {
  QuantumGame game;
  ProductPlay others;  // slot `player` is overwritten
  std::size_t player = 0;
  CVector r, s;
  double mu = 0.5;

  double gap() const {
    auto value = [&](const CVector& slot) {
      std::vector<CVector> f;
      for (std::size_t j = 0; j < others.size(); ++j)
        f.push_back(j == player ? slot : others[j].amplitudes());
      return observable_value(game, tensor_product(f), player);
    };
    const CVector mixed = mu * r + (1.0 - mu) * s;
    return std::abs(value(mixed) - (mu * value(r) + (1.0 - mu) * value(s)));
  }
};

inline NonlinearityWitness observable_nonlinearity_witness() {
  QuantumGame game({2, 2}, UnitaryOperator::identity(4),
                   {ObservablePayoff{{0, 0, 0, 1}}, ObservablePayoff{{0, 0, 0, 1}}});
  return {std::move(game), ProductPlay({basis_state(2, 0), basis_state(2, 1)}), 0,
          basis_state(2, 0).amplitudes(), basis_state(2, 1).amplitudes(), 0.5};
}

// Two-qubit transverse-field schedule: H_I = -(X⊗I + I⊗X) with ground
// state |++⟩, H_f = Z⊗I + I⊗Z with unique ground state |11⟩.
inline AdiabaticSchedule two_qubit_schedule() {
  const CMatrix id = CMatrix::Identity(2, 2);
  CMatrix hi = -(gates::kron(gates::pauli_x(), id) + gates::kron(id, gates::pauli_x()));
  CMatrix hf = gates::kron(gates::pauli_z(), id) + gates::kron(id, gates::pauli_z());
  std::vector<double> s;
  for (int k = 0; k <= 10; ++k) s.push_back(k / 10.0);
  return {{2, 2}, HermitianOperator::checked(hi), HermitianOperator::checked(hf), std::move(s), 1.0};
}

}  // namespace demos

}  // namespace qnash
