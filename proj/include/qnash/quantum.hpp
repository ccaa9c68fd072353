#pragma once

// Pure-strategy quantum games: a unitary Q acting on one qudit per player,
// with either overlap payoffs ⟨ψ_i, Q q⟩ (linear in every player's factor)
// or observable payoffs Σ_j e_j |(Q q)_j|² (quadratic).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qnash/config.hpp"
#include "qnash/errors.hpp"
#include "qnash/tensor.hpp"

namespace qnash {

struct OverlapPayoff {
  PureState target;
  friend bool operator==(const OverlapPayoff&, const OverlapPayoff&) = default;
};

struct ObservablePayoff {
  std::vector<double> eigenvalues;  // one per joint basis state
  friend bool operator==(const ObservablePayoff&, const ObservablePayoff&) = default;
};

using PayoffSpec = std::variant<OverlapPayoff, ObservablePayoff>;

enum class ComplexPreorder { RealPart, Magnitude, Lexicographic };

inline bool preorder_less_equal(Complex a, Complex b, ComplexPreorder order) {
  switch (order) {
    case ComplexPreorder::RealPart:
      return a.real() <= b.real();
    case ComplexPreorder::Magnitude:
      return std::abs(a) <= std::abs(b);
    case ComplexPreorder::Lexicographic:
      return a.real() < b.real() || (a.real() == b.real() && a.imag() <= b.imag());
  }
  return false;
}

// Primary real key of a payoff under a preorder.
inline double preorder_key(Complex z, ComplexPreorder order) {
  return order == ComplexPreorder::Magnitude ? std::abs(z) : z.real();
}

class QuantumGame {
 public:
  QuantumGame(std::vector<std::size_t> dims, UnitaryOperator q, std::vector<PayoffSpec> payoffs)
      : dims_(std::move(dims)), q_(std::move(q)), payoffs_(std::move(payoffs)) {
    if (dims_.size() < 2) throw DimensionError("quantum game: at least two players required");
    for (auto d : dims_)
      if (d < 2) throw DimensionError("quantum game: every player needs a qudit of dimension >= 2");
    const std::size_t total = joint_dimension(dims_);
    if (q_.dimension() != total)
      throw DimensionError("quantum game: unitary is " + std::to_string(q_.dimension()) +
                           "-dimensional, joint space is " + std::to_string(total));
    if (payoffs_.size() != dims_.size())
      throw DimensionError("quantum game: one payoff specification per player required");
    for (std::size_t i = 0; i < payoffs_.size(); ++i) {
      if (const auto* o = std::get_if<OverlapPayoff>(&payoffs_[i])) {
        if (o->target.dimension() != total)
          throw DimensionError("quantum game: overlap target of player " + std::to_string(i) +
                               " has the wrong dimension");
      } else {
        const auto& e = std::get<ObservablePayoff>(payoffs_[i]).eigenvalues;
        if (e.size() != total)
          throw DimensionError("quantum game: observable of player " + std::to_string(i) +
                               " needs one eigenvalue per joint basis state");
        for (double x : e)
          if (!std::isfinite(x)) throw InvariantError("quantum game: non-finite eigenvalue");
      }
    }
  }

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t num_players() const { return dims_.size(); }
  std::size_t joint_dim() const { return q_.dimension(); }
  const UnitaryOperator& unitary() const { return q_; }
  const std::vector<PayoffSpec>& payoffs() const { return payoffs_; }
  const PayoffSpec& payoff(std::size_t i) const { return payoffs_.at(i); }
  bool is_overlap(std::size_t i) const { return std::holds_alternative<OverlapPayoff>(payoff(i)); }

  friend bool operator==(const QuantumGame&, const QuantumGame&) = default;

 private:
  std::vector<std::size_t> dims_;
  UnitaryOperator q_;
  std::vector<PayoffSpec> payoffs_;
};

inline void check_play(const QuantumGame& game, const ProductPlay& play) {
  if (play.dims() != game.dims()) throw DimensionError("play does not match the game's dimensions");
}

// Q applied to the tensor product of the factors, phase untouched.
inline CVector prepared_vector(const QuantumGame& game, const ProductPlay& play) {
  check_play(game, play);
  return apply_unitary(game.unitary(), tensor_product(play));
}

inline PureState prepared_state(const QuantumGame& game, const ProductPlay& play) {
  return canonicalize_phase(prepared_vector(game, play));
}

inline const OverlapPayoff& overlap_spec(const QuantumGame& game, std::size_t i) {
  const auto* o = std::get_if<OverlapPayoff>(&game.payoff(i));
  if (!o) throw InvariantError("player " + std::to_string(i) + " does not have an overlap payoff");
  return *o;
}

inline const ObservablePayoff& observable_spec(const QuantumGame& game, std::size_t i) {
  const auto* o = std::get_if<ObservablePayoff>(&game.payoff(i));
  if (!o) throw InvariantError("player " + std::to_string(i) + " does not have an observable payoff");
  return *o;
}

// Payoffs on an arbitrary (possibly unnormalized) input vector of the joint
// space, before Q. These are the ambient-space forms in which linearity and
// its failure are stated.
inline Complex overlap_value(const QuantumGame& game, const CVector& joint_input, std::size_t i) {
  return inner_product(overlap_spec(game, i).target.amplitudes(),
                       apply_unitary(game.unitary(), joint_input));
}

inline double observable_value(const QuantumGame& game, const CVector& joint_input, std::size_t i) {
  const auto& e = observable_spec(game, i).eigenvalues;
  const CVector out = apply_unitary(game.unitary(), joint_input);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < out.size(); ++j) sum += e[static_cast<std::size_t>(j)] * std::norm(out[j]);
  return sum;
}

inline Complex overlap_payoff(const QuantumGame& game, const ProductPlay& play, std::size_t i) {
  check_play(game, play);
  return overlap_value(game, tensor_product(play), i);
}

inline double observable_payoff(const QuantumGame& game, const ProductPlay& play, std::size_t i) {
  check_play(game, play);
  return observable_value(game, tensor_product(play), i);
}

// Either payoff as a complex number (observable payoffs are real).
inline Complex payoff_value(const QuantumGame& game, const ProductPlay& play, std::size_t i) {
  return game.is_overlap(i) ? overlap_payoff(game, play, i) : Complex(observable_payoff(game, play, i), 0.0);
}

inline std::vector<Complex> payoff_values(const QuantumGame& game, const ProductPlay& play) {
  std::vector<Complex> out;
  for (std::size_t i = 0; i < game.num_players(); ++i) out.push_back(payoff_value(game, play, i));
  return out;
}

// v_i with overlap_payoff(play | slot i = q) = ⟨v_i, q⟩.
inline CVector overlap_response_vector(const QuantumGame& game, const ProductPlay& play,
                                       std::size_t i) {
  check_play(game, play);
  const CVector pulled_back = game.unitary().matrix().adjoint() * overlap_spec(game, i).target.amplitudes();
  return partial_contraction(pulled_back, play, i);
}

// M_i with observable_payoff(play | slot i = q) = ⟨q, M_i q⟩.
inline CMatrix observable_response_operator(const QuantumGame& game, const ProductPlay& play,
                                            std::size_t i) {
  check_play(game, play);
  const auto& e = observable_spec(game, i).eigenvalues;
  const CMatrix& q = game.unitary().matrix();
  const RVector diag = Eigen::Map<const RVector>(e.data(), static_cast<Eigen::Index>(e.size()));
  const CMatrix k = q.adjoint() * diag.cast<Complex>().asDiagonal() * q;
  const CMatrix p = slot_embedding(play, i);
  CMatrix m = p.adjoint() * k * p;
  return 0.5 * (m + m.adjoint());
}

// The normalized contraction vector: with the phase chosen freely it attains
// |⟨v_i, q⟩| = ‖v_i‖, the maximum under every supported preorder. When v_i
// vanishes the player is indifferent and keeps the current factor.
inline PureState best_response_overlap(const QuantumGame& game, const ProductPlay& play,
                                       std::size_t i,
                                       ComplexPreorder /*order*/ = ComplexPreorder::RealPart,
                                       const Tolerances& tol = kDefaultTolerances) {
  const CVector v = overlap_response_vector(game, play, i);
  const double norm = v.norm();
  if (norm <= tol.indifference) return play[i];
  return canonicalize_phase(v / norm, tol);
}

inline PureState best_response_observable(const QuantumGame& game, const ProductPlay& play,
                                          std::size_t i, const Tolerances& tol = kDefaultTolerances) {
  return extremal_eigenpair(observable_response_operator(game, play, i), true, tol).vector;
}

inline PureState best_response(const QuantumGame& game, const ProductPlay& play, std::size_t i,
                               ComplexPreorder order = ComplexPreorder::RealPart) {
  return game.is_overlap(i) ? best_response_overlap(game, play, i, order)
                            : best_response_observable(game, play, i);
}

struct PlayerGain {
  double best = 0.0;
  double current = 0.0;
  double gain() const { return std::max(0.0, best - current); }
};

// Exact unilateral improvement available to player i. Overlap payoffs are
// compared after player i aligns the global phase of its own factor, so
// both values are real and non-negative before the preorder key is taken.
inline PlayerGain exact_gain(const QuantumGame& game, const ProductPlay& play, std::size_t i,
                             ComplexPreorder order = ComplexPreorder::RealPart) {
  if (game.is_overlap(i)) {
    const CVector v = overlap_response_vector(game, play, i);
    const Complex now = inner_product(v, play[i].amplitudes());
    return {preorder_key(Complex(v.norm(), 0.0), order), preorder_key(Complex(std::abs(now), 0.0), order)};
  }
  const CMatrix m = observable_response_operator(game, play, i);
  const double top = extremal_eigenpair(m, true).value;
  const CVector& q = play[i].amplitudes();
  return {top, inner_product(q, m * q).real()};
}

// Phase-aligned value of player i's payoff at a play, comparable with
// PlayerGain::best.
inline double aligned_value(const QuantumGame& game, const ProductPlay& play, std::size_t i,
                            ComplexPreorder order = ComplexPreorder::RealPart) {
  if (game.is_overlap(i)) return preorder_key(Complex(std::abs(overlap_payoff(game, play, i)), 0.0), order);
  return observable_payoff(game, play, i);
}

// Countering between two plays with every player using its own preorder on
// the raw payoffs of the canonical representatives.
inline bool counters(const QuantumGame& game, const ProductPlay& p_prime, const ProductPlay& p,
                     ComplexPreorder order = ComplexPreorder::RealPart) {
  for (std::size_t i = 0; i < game.num_players(); ++i)
    if (!preorder_less_equal(payoff_value(game, p, i), payoff_value(game, p_prime, i), order))
      return false;
  return true;
}

// ---------------------------------------------------------------------------
// Iterated best response

struct DynamicsOptions {
  double tol = 1e-10;
  std::size_t max_iter = 500;
  ComplexPreorder preorder = ComplexPreorder::RealPart;
  int cycle_window = kDefaultTolerances.cycle_window;
  double cycle_match = kDefaultTolerances.cycle_match;
};

struct TraceRow {
  std::size_t iteration = 0;
  std::vector<Complex> payoffs;
  double step = 0.0;
};

struct Converged {
  ProductPlay play;
  std::size_t iterations = 0;
};

struct CycleDetected {
  std::size_t period = 0;
  std::vector<ProductPlay> witness;  // one full period, oldest first
  std::size_t iterations = 0;
};

struct MaxIterations {
  ProductPlay last;
  std::size_t iterations = 0;
};

struct DynamicsOutcome {
  std::variant<Converged, CycleDetected, MaxIterations> result;
  std::vector<TraceRow> trace;

  bool converged() const { return std::holds_alternative<Converged>(result); }
  const char* kind() const {
    switch (result.index()) {
      case 0: return "converged";
      case 1: return "cycle";
      default: return "max_iterations";
    }
  }
  std::size_t iterations() const {
    return std::visit([](const auto& r) { return r.iterations; }, result);
  }
  const ProductPlay& final_play() const {
    if (const auto* c = std::get_if<Converged>(&result)) return c->play;
    if (const auto* c = std::get_if<CycleDetected>(&result)) return c->witness.back();
    return std::get<MaxIterations>(result).last;
  }
};

inline double max_factor_distance(const ProductPlay& a, const ProductPlay& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, fubini_study_distance(a[i], b[i]));
  return d;
}

// Round-robin best response. A sweep updates players 0..N-1 in order; the
// step is the largest Fubini-Study move of any factor during the sweep.
inline DynamicsOutcome iterated_best_response(const QuantumGame& game, const ProductPlay& start,
                                              const DynamicsOptions& opt = {}) {
  check_play(game, start);
  DynamicsOutcome out{MaxIterations{start, 0}, {}};
  std::vector<ProductPlay> history{start};
  ProductPlay play = start;

  for (std::size_t sweep = 1; sweep <= opt.max_iter; ++sweep) {
    const ProductPlay before = play;
    for (std::size_t i = 0; i < game.num_players(); ++i)
      play = play.with_factor(i, best_response(game, play, i, opt.preorder));
    const double step = max_factor_distance(before, play);
    out.trace.push_back({sweep, payoff_values(game, play), step});

    if (step <= opt.tol) {
      out.result = Converged{play, sweep};
      return out;
    }
    // history.back() is the play one sweep ago; a match there is a stall,
    // not a cycle, and is left to the convergence test.
    for (std::size_t back = 2; back <= history.size(); ++back) {
      const ProductPlay& old = history[history.size() - back];
      if (max_factor_distance(old, play) <= opt.cycle_match) {
        std::vector<ProductPlay> witness(history.end() - static_cast<std::ptrdiff_t>(back) + 1,
                                         history.end());
        witness.push_back(play);
        out.result = CycleDetected{back, std::move(witness), sweep};
        return out;
      }
    }
    history.push_back(play);
    if (history.size() > static_cast<std::size_t>(opt.cycle_window)) history.erase(history.begin());
  }
  out.result = MaxIterations{play, opt.max_iter};
  return out;
}

inline ProductPlay random_play(const QuantumGame& game, std::uint64_t seed) {
  Rng rng(seed);
  return haar_random_play(game.dims(), rng);
}

// ---------------------------------------------------------------------------
// ε-Nash verification

struct QuantumNashEvidence {
  ProductPlay play;
  double epsilon = 0.0;
  std::vector<double> per_player_gain;  // exact, from the analytic best response
  std::vector<double> probe_gain;       // largest gain among random deviations
};

struct QuantumCertificate : QuantumNashEvidence {};

struct QuantumRejection : QuantumNashEvidence {
  std::size_t worst_player = 0;
};

using QuantumVerdict = std::variant<QuantumCertificate, QuantumRejection>;

inline bool accepted(const QuantumVerdict& v) { return std::holds_alternative<QuantumCertificate>(v); }

inline const QuantumNashEvidence& evidence(const QuantumVerdict& v) {
  return std::visit([](const auto& e) -> const QuantumNashEvidence& { return e; }, v);
}

inline QuantumVerdict verify_epsilon_nash_quantum(const QuantumGame& game, const ProductPlay& play,
                                                  double epsilon, std::size_t num_probes,
                                                  std::uint64_t seed,
                                                  ComplexPreorder order = ComplexPreorder::RealPart) {
  check_play(game, play);
  QuantumNashEvidence ev{play, epsilon, {}, {}};
  Rng rng(seed);
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    const PlayerGain g = exact_gain(game, play, i, order);
    // Differences at rounding level, e.g. in a constant-payoff game, are not gains.
    const double floor = kDefaultTolerances.gain_roundoff * std::max({1.0, std::abs(g.best), std::abs(g.current)});
    const auto clean = [floor](double x) { return x <= floor ? 0.0 : x; };
    ev.per_player_gain.push_back(clean(g.gain()));
    double probe = 0.0;
    for (std::size_t k = 0; k < num_probes; ++k) {
      const ProductPlay dev = play.with_factor(i, haar_random_state(game.dims()[i], rng));
      probe = std::max(probe, aligned_value(game, dev, i, order) - g.current);
    }
    ev.probe_gain.push_back(clean(probe));
  }
  std::size_t worst = 0;
  double worst_gain = -1.0;
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    const double g = std::max(ev.per_player_gain[i], ev.probe_gain[i]);
    if (g > worst_gain) {
      worst_gain = g;
      worst = i;
    }
  }
  if (worst_gain <= epsilon) return QuantumCertificate{std::move(ev)};
  return QuantumRejection{std::move(ev), worst};
}

// ---------------------------------------------------------------------------
// Grid oracle on CP¹ × CP¹

inline constexpr std::size_t kMaxGridResolution = 64;

// Point (θ_a, φ_b) of the Bloch-sphere grid: θ_a = π a/(R-1), φ_b = 2π b/R.
inline PureState grid_state(std::size_t a, std::size_t b, std::size_t resolution) {
  const double theta = std::numbers::pi * static_cast<double>(a) / static_cast<double>(resolution - 1);
  const double phi = 2.0 * std::numbers::pi * static_cast<double>(b) / static_cast<double>(resolution);
  CVector v(2);
  v << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);
  return canonicalize_phase(v);
}

inline std::vector<PureState> grid_states(std::size_t resolution) {
  if (resolution < 2 || resolution > kMaxGridResolution)
    throw DimensionError("grid resolution must lie in [2, 64]");
  std::vector<PureState> out;
  out.reserve(resolution * resolution);
  for (std::size_t a = 0; a < resolution; ++a)
    for (std::size_t b = 0; b < resolution; ++b) out.push_back(grid_state(a, b, resolution));
  return out;
}

// Best phase-aligned payoff player i reaches on the grid, others fixed.
inline double grid_best_response_value(const QuantumGame& game, const ProductPlay& play,
                                       std::size_t i, std::size_t resolution,
                                       ComplexPreorder order = ComplexPreorder::RealPart) {
  check_play(game, play);
  if (game.dims().at(i) != 2) throw DimensionError("grid oracle needs a qubit player");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : grid_states(resolution))
    best = std::max(best, aligned_value(game, play.with_factor(i, s), i, order));
  return best;
}

struct GridPlay {
  std::size_t index0 = 0, index1 = 0;  // flat grid indices a*R + b
  double max_gain = 0.0;
  ProductPlay play;
};

struct GridReport {
  std::size_t resolution = 0;
  double epsilon = 0.0;
  std::size_t total_plays = 0;
  std::size_t accepted = 0;
  double min_max_gain = 0.0;         // smallest worst-player gain over the grid
  std::vector<double> best_payoff;   // per player, over all grid plays
  std::vector<GridPlay> witnesses;   // up to max_witnesses accepted plays, lowest gain first
};

// Exhaustive ε-Nash scan of a two-qubit game over the discretized play grid;
// deviations are restricted to the same grid.
inline GridReport grid_search_pure_nash(const QuantumGame& game, std::size_t resolution,
                                        double epsilon = 0.05,
                                        ComplexPreorder order = ComplexPreorder::RealPart,
                                        std::size_t max_witnesses = 32) {
  if (game.num_players() != 2 || game.dims()[0] != 2 || game.dims()[1] != 2)
    throw DimensionError("grid search supports two qubit players only");
  const auto states = grid_states(resolution);
  const std::size_t g = states.size();

  // Per player, a 4×4 Hermitian form (observable) or a 4-vector (overlap)
  // evaluated on x⊗y.
  std::vector<CVector> pulled(2);
  std::vector<CMatrix> forms(2);
  for (std::size_t i = 0; i < 2; ++i) {
    const CMatrix& q = game.unitary().matrix();
    if (game.is_overlap(i)) {
      pulled[i] = q.adjoint() * overlap_spec(game, i).target.amplitudes();
    } else {
      const auto& e = observable_spec(game, i).eigenvalues;
      const RVector d = Eigen::Map<const RVector>(e.data(), 4);
      forms[i] = q.adjoint() * d.cast<Complex>().asDiagonal() * q;
    }
  }
  auto key = [&](std::size_t i, const CVector& joint) {
    if (game.is_overlap(i)) return preorder_key(Complex(std::abs(pulled[i].dot(joint)), 0.0), order);
    return joint.dot(forms[i] * joint).real();
  };
  auto joint_of = [&](std::size_t a, std::size_t b) {
    CVector j(4);
    const auto& x = states[a].amplitudes();
    const auto& y = states[b].amplitudes();
    j << x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1];
    return j;
  };

  std::vector<double> best0_given_y(g, -std::numeric_limits<double>::infinity());
  std::vector<double> best1_given_x(g, -std::numeric_limits<double>::infinity());
  GridReport report;
  report.resolution = resolution;
  report.epsilon = epsilon;
  report.total_plays = g * g;
  report.best_payoff.assign(2, -std::numeric_limits<double>::infinity());
  for (std::size_t a = 0; a < g; ++a)
    for (std::size_t b = 0; b < g; ++b) {
      const CVector j = joint_of(a, b);
      const double k0 = key(0, j), k1 = key(1, j);
      best0_given_y[b] = std::max(best0_given_y[b], k0);
      best1_given_x[a] = std::max(best1_given_x[a], k1);
      report.best_payoff[0] = std::max(report.best_payoff[0], k0);
      report.best_payoff[1] = std::max(report.best_payoff[1], k1);
    }

  report.min_max_gain = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < g; ++a)
    for (std::size_t b = 0; b < g; ++b) {
      const CVector j = joint_of(a, b);
      const double gain = std::max(best0_given_y[b] - key(0, j), best1_given_x[a] - key(1, j));
      report.min_max_gain = std::min(report.min_max_gain, gain);
      if (gain > epsilon) continue;
      ++report.accepted;
      if (report.witnesses.size() < max_witnesses || gain < report.witnesses.back().max_gain) {
        GridPlay w{a, b, gain, ProductPlay({states[a], states[b]})};
        auto pos = std::upper_bound(report.witnesses.begin(), report.witnesses.end(), gain,
                                    [](double v, const GridPlay& p) { return v < p.max_gain; });
        report.witnesses.insert(pos, std::move(w));
        if (report.witnesses.size() > max_witnesses) report.witnesses.pop_back();
      }
    }
  return report;
}

}  // namespace qnash
