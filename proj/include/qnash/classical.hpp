#pragma once

// Finite normal-form games and their mixed extension: expected payoffs,
// the countering relation, pure best responses, exact two-player support
// enumeration and ε-Nash certificates.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qnash/config.hpp"
#include "qnash/errors.hpp"

namespace qnash {

// Payoff tensors are stored flat in row-major order: the first player's
// strategy is the most significant index.
class FiniteGame {
 public:
  FiniteGame(std::vector<std::size_t> strategy_counts, std::vector<std::vector<double>> payoffs)
      : counts_(std::move(strategy_counts)), payoffs_(std::move(payoffs)) {
    if (counts_.empty()) throw DimensionError("finite game: no players");
    outcomes_ = 1;
    for (auto k : counts_) {
      if (k < 1) throw DimensionError("finite game: every player needs a strategy");
      outcomes_ *= k;
    }
    if (payoffs_.size() != counts_.size())
      throw DimensionError("finite game: one payoff tensor per player required");
    for (const auto& t : payoffs_) {
      if (t.size() != outcomes_) throw DimensionError("finite game: payoff tensor shape");
      for (double x : t)
        if (!std::isfinite(x)) throw InvariantError("finite game: non-finite payoff");
    }
  }

  static FiniteGame bimatrix(const Eigen::MatrixXd& row, const Eigen::MatrixXd& col) {
    if (row.rows() != col.rows() || row.cols() != col.cols())
      throw DimensionError("bimatrix: payoff matrices differ in shape");
    std::vector<double> a, b;
    for (Eigen::Index r = 0; r < row.rows(); ++r)
      for (Eigen::Index c = 0; c < row.cols(); ++c) {
        a.push_back(row(r, c));
        b.push_back(col(r, c));
      }
    return FiniteGame({static_cast<std::size_t>(row.rows()), static_cast<std::size_t>(row.cols())},
                      {std::move(a), std::move(b)});
  }

  std::size_t num_players() const { return counts_.size(); }
  const std::vector<std::size_t>& strategy_counts() const { return counts_; }
  std::size_t num_outcomes() const { return outcomes_; }
  const std::vector<double>& payoff_tensor(std::size_t player) const { return payoffs_.at(player); }

  std::size_t flat_index(std::span<const std::size_t> pure) const {
    if (pure.size() != counts_.size()) throw DimensionError("finite game: pure profile length");
    std::size_t idx = 0;
    for (std::size_t j = 0; j < counts_.size(); ++j) {
      if (pure[j] >= counts_[j]) throw DimensionError("finite game: strategy out of range");
      idx = idx * counts_[j] + pure[j];
    }
    return idx;
  }

  double payoff(std::size_t player, std::span<const std::size_t> pure) const {
    return payoffs_.at(player)[flat_index(pure)];
  }

  friend bool operator==(const FiniteGame&, const FiniteGame&) = default;

 private:
  std::vector<std::size_t> counts_;
  std::vector<std::vector<double>> payoffs_;
  std::size_t outcomes_ = 0;
};

struct MixedProfile {
  std::vector<std::vector<double>> distributions;

  static MixedProfile pure(std::span<const std::size_t> counts, std::span<const std::size_t> choice) {
    MixedProfile p;
    for (std::size_t j = 0; j < counts.size(); ++j) {
      std::vector<double> d(counts[j], 0.0);
      d.at(choice[j]) = 1.0;
      p.distributions.push_back(std::move(d));
    }
    return p;
  }

  static MixedProfile uniform(std::span<const std::size_t> counts) {
    MixedProfile p;
    for (auto k : counts) p.distributions.emplace_back(k, 1.0 / static_cast<double>(k));
    return p;
  }

  friend bool operator==(const MixedProfile&, const MixedProfile&) = default;
};

inline void validate_profile(const FiniteGame& game, const MixedProfile& profile,
                             const Tolerances& tol = kDefaultTolerances) {
  const auto& counts = game.strategy_counts();
  if (profile.distributions.size() != counts.size())
    throw DimensionError("profile: expected " + std::to_string(counts.size()) + " distributions");
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const auto& d = profile.distributions[j];
    if (d.size() != counts[j])
      throw DimensionError("profile: player " + std::to_string(j) + " distribution length");
    double sum = 0.0;
    for (double x : d) {
      if (!std::isfinite(x) || x < 0.0)
        throw InvariantError("profile: player " + std::to_string(j) + " has a negative entry");
      sum += x;
    }
    if (std::abs(sum - 1.0) > tol.probability_sum)
      throw InvariantError("profile: player " + std::to_string(j) + " does not sum to 1");
  }
}

// Expected payoff of every player under a product distribution.
inline std::vector<double> expected_payoffs(const FiniteGame& game, const MixedProfile& profile) {
  validate_profile(game, profile);
  const auto& counts = game.strategy_counts();
  const std::size_t n = counts.size();
  std::vector<double> out(n, 0.0);
  std::vector<std::size_t> digit(n, 0);
  for (std::size_t joint = 0; joint < game.num_outcomes(); ++joint) {
    double w = 1.0;
    for (std::size_t j = 0; j < n && w != 0.0; ++j) w *= profile.distributions[j][digit[j]];
    if (w != 0.0)
      for (std::size_t i = 0; i < n; ++i) out[i] += w * game.payoff_tensor(i)[joint];
    for (std::size_t j = n; j-- > 0;) {
      if (++digit[j] < counts[j]) break;
      digit[j] = 0;
    }
  }
  return out;
}

inline double expected_payoff(const FiniteGame& game, const MixedProfile& profile, std::size_t i) {
  if (i >= game.num_players()) throw DimensionError("expected_payoff: player index out of range");
  return expected_payoffs(game, profile)[i];
}

// Player i's expected payoff for each of its pure strategies, the others
// playing their distributions.
inline std::vector<double> pure_strategy_values(const FiniteGame& game,
                                                const MixedProfile& profile, std::size_t i) {
  validate_profile(game, profile);
  if (i >= game.num_players()) throw DimensionError("player index out of range");
  const auto& counts = game.strategy_counts();
  const std::size_t n = counts.size();
  std::vector<double> values(counts[i], 0.0);
  std::vector<std::size_t> digit(n, 0);
  const auto& tensor = game.payoff_tensor(i);
  for (std::size_t joint = 0; joint < game.num_outcomes(); ++joint) {
    double w = 1.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) w *= profile.distributions[j][digit[j]];
    values[digit[i]] += w * tensor[joint];
    for (std::size_t j = n; j-- > 0;) {
      if (++digit[j] < counts[j]) break;
      digit[j] = 0;
    }
  }
  return values;
}

// p' counters p when no player is worse off under p'.
inline bool counters(const FiniteGame& game, const MixedProfile& p_prime, const MixedProfile& p,
                     const Tolerances& tol = kDefaultTolerances) {
  const auto a = expected_payoffs(game, p_prime);
  const auto b = expected_payoffs(game, p);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] < b[i] - tol.counters_slack) return false;
  return true;
}

// One-hot on the lowest-index maximizer.
inline std::vector<double> best_response_mixed(const FiniteGame& game, const MixedProfile& profile,
                                               std::size_t i) {
  const auto values = pure_strategy_values(game, profile, i);
  const double best = *std::max_element(values.begin(), values.end());
  std::size_t arg = 0;
  while (values[arg] < best - 1e-12 * std::max(1.0, std::abs(best))) ++arg;
  std::vector<double> out(values.size(), 0.0);
  out[arg] = 1.0;
  return out;
}

struct EquilibriumCertificate {
  MixedProfile profile;
  double epsilon = 0.0;
  std::vector<double> per_player_gain;

  double max_gain() const {
    return per_player_gain.empty() ? 0.0
                                   : *std::max_element(per_player_gain.begin(), per_player_gain.end());
  }
};

struct NashRejection {
  MixedProfile profile;
  double epsilon = 0.0;
  std::vector<double> per_player_gain;
  std::size_t worst_player = 0;
};

using NashVerdict = std::variant<EquilibriumCertificate, NashRejection>;

inline bool accepted(const NashVerdict& v) {
  return std::holds_alternative<EquilibriumCertificate>(v);
}

inline std::vector<double> unilateral_gains(const FiniteGame& game, const MixedProfile& profile) {
  const auto current = expected_payoffs(game, profile);
  std::vector<double> gains(game.num_players());
  for (std::size_t i = 0; i < gains.size(); ++i) {
    const auto values = pure_strategy_values(game, profile, i);
    const double best = *std::max_element(values.begin(), values.end());
    gains[i] = std::max(0.0, best - current[i]);
  }
  return gains;
}

inline NashVerdict is_epsilon_nash(const FiniteGame& game, const MixedProfile& profile,
                                   double epsilon) {
  auto gains = unilateral_gains(game, profile);
  const auto worst = static_cast<std::size_t>(
      std::max_element(gains.begin(), gains.end()) - gains.begin());
  if (gains[worst] <= epsilon) return EquilibriumCertificate{profile, epsilon, std::move(gains)};
  return NashRejection{profile, epsilon, std::move(gains), worst};
}

namespace detail {

// Solves [M -1; 1ᵀ 0][w; v] = [0; 1] so that M·w is constant and Σw = 1.
// Falls back to least squares on singular systems; returns false when the
// residual shows no solution exists.
inline bool solve_indifference(const Eigen::MatrixXd& m, Eigen::VectorXd& w) {
  const Eigen::Index s = m.rows();
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(s + 1, m.cols() + 1);
  sys.topLeftCorner(s, m.cols()) = m;
  sys.topRightCorner(s, 1).setConstant(-1.0);
  sys.bottomLeftCorner(1, m.cols()).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
  rhs[s] = 1.0;

  Eigen::VectorXd sol;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
  if (lu.isInvertible()) {
    sol = lu.solve(rhs);
  } else {
    sol = sys.completeOrthogonalDecomposition().solve(rhs);
    if ((sys * sol - rhs).cwiseAbs().maxCoeff() > 1e-9) return false;
  }
  w = sol.head(m.cols());
  return w.allFinite();
}

inline void for_each_subset(std::size_t n, std::size_t k,
                            const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) return;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline bool same_profile(const MixedProfile& a, const MixedProfile& b, double tol) {
  for (std::size_t j = 0; j < a.distributions.size(); ++j)
    for (std::size_t k = 0; k < a.distributions[j].size(); ++k)
      if (std::abs(a.distributions[j][k] - b.distributions[j][k]) > tol) return false;
  return true;
}

}  // namespace detail

inline constexpr std::size_t kMaxSupportEnumerationStrategies = 8;

// All equilibria with equal-size supports of a two-player game. For
// nondegenerate games this is the complete equilibrium set.
inline std::vector<EquilibriumCertificate> support_enumeration_nash(
    const FiniteGame& game, const Tolerances& tol = kDefaultTolerances) {
  if (game.num_players() != 2)
    throw DimensionError("support enumeration needs exactly 2 players, got " +
                         std::to_string(game.num_players()));
  const std::size_t rows = game.strategy_counts()[0];
  const std::size_t cols = game.strategy_counts()[1];
  if (rows > kMaxSupportEnumerationStrategies || cols > kMaxSupportEnumerationStrategies)
    throw DimensionError("support enumeration limited to 8 strategies per player");

  Eigen::MatrixXd a(rows, cols), b(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      a(r, c) = game.payoff_tensor(0)[r * cols + c];
      b(r, c) = game.payoff_tensor(1)[r * cols + c];
    }

  std::vector<EquilibriumCertificate> found;
  const double eps = tol.exact_solver_epsilon;

  auto to_distribution = [](const Eigen::VectorXd& w, const std::vector<std::size_t>& support,
                            std::size_t n, std::vector<double>& out) {
    out.assign(n, 0.0);
    double sum = 0.0;
    for (std::size_t k = 0; k < support.size(); ++k) {
      const double x = w[static_cast<Eigen::Index>(k)];
      if (x < -1e-10) return false;
      out[support[k]] = std::max(0.0, x);
      sum += out[support[k]];
    }
    if (sum <= 0.0) return false;
    for (double& x : out) x /= sum;
    return true;
  };

  for (std::size_t s = 1; s <= std::min(rows, cols); ++s) {
    detail::for_each_subset(rows, s, [&](const std::vector<std::size_t>& row_support) {
      detail::for_each_subset(cols, s, [&](const std::vector<std::size_t>& col_support) {
        Eigen::MatrixXd a_sub(s, s), bt_sub(s, s);
        for (std::size_t r = 0; r < s; ++r)
          for (std::size_t c = 0; c < s; ++c) {
            a_sub(r, c) = a(row_support[r], col_support[c]);
            bt_sub(c, r) = b(row_support[r], col_support[c]);
          }
        Eigen::VectorXd y, x;
        if (!detail::solve_indifference(a_sub, y)) return;
        if (!detail::solve_indifference(bt_sub, x)) return;

        MixedProfile profile;
        profile.distributions.resize(2);
        if (!to_distribution(x, row_support, rows, profile.distributions[0])) return;
        if (!to_distribution(y, col_support, cols, profile.distributions[1])) return;

        auto verdict = is_epsilon_nash(game, profile, eps);
        if (!accepted(verdict)) return;
        for (const auto& f : found)
          if (detail::same_profile(f.profile, profile, 1e-9)) return;
        found.push_back(std::get<EquilibriumCertificate>(std::move(verdict)));
      });
    });
  }
  if (found.empty())
    throw DegenerateInputError(
        "support enumeration found no equilibrium; the game is degenerate");
  return found;
}

inline std::vector<double> sample_simplex(std::size_t k, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> d(k);
  double sum = 0.0;
  for (auto& x : d) {
    x = expo(rng);
    sum += x;
  }
  for (auto& x : d) x /= sum;
  return d;
}

inline MixedProfile sample_profile(const FiniteGame& game, Rng& rng) {
  MixedProfile p;
  for (auto k : game.strategy_counts()) p.distributions.push_back(sample_simplex(k, rng));
  return p;
}

inline MixedProfile mix_profiles(const MixedProfile& r, const MixedProfile& s, double mu) {
  MixedProfile out = r;
  for (std::size_t j = 0; j < out.distributions.size(); ++j)
    for (std::size_t k = 0; k < out.distributions[j].size(); ++k)
      out.distributions[j][k] = mu * r.distributions[j][k] + (1.0 - mu) * s.distributions[j][k];
  return out;
}

// How the two countering profiles r, s of a convexity trial relate.
enum class CombinationMode {
  // r and s are arbitrary countering profiles; every player's slot is mixed.
  JointProfile,
  // r and s agree on every slot except one player's; only that slot is mixed.
  SingleSlot,
};

struct ConvexityReport {
  std::size_t requested = 0;
  std::size_t passes = 0;
  std::size_t failures = 0;
  std::size_t proposals = 0;  // rejection-sampling draws spent
  std::size_t shortfall = 0;  // trials that could not be formed within the draw budget
  double worst_violation = 0.0;
};

// Draws profiles near p (p + λ(u - p), u uniform on the simplex, λ = U³ so
// proposals concentrate near p) and keeps those that counter p.
inline ConvexityReport verify_countering_convexity(const FiniteGame& game, const MixedProfile& p,
                                                   std::size_t num_samples, std::uint64_t seed,
                                                   CombinationMode mode = CombinationMode::JointProfile,
                                                   std::size_t budget_per_sample = 20000) {
  validate_profile(game, p);
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto base = expected_payoffs(game, p);
  ConvexityReport report;
  report.requested = num_samples;
  const std::size_t budget = budget_per_sample * std::max<std::size_t>(num_samples, 1);

  auto propose = [&](const MixedProfile& around, std::size_t only_slot) {
    MixedProfile q = around;
    const double lambda = std::pow(unit(rng), 3.0);
    for (std::size_t j = 0; j < q.distributions.size(); ++j) {
      if (only_slot != SIZE_MAX && j != only_slot) continue;
      auto u = sample_simplex(q.distributions[j].size(), rng);
      for (std::size_t k = 0; k < u.size(); ++k)
        q.distributions[j][k] = lambda * u[k] + (1.0 - lambda) * p.distributions[j][k];
    }
    return q;
  };

  auto draw_countering = [&](const MixedProfile& around, std::size_t only_slot,
                             MixedProfile& out) {
    while (report.proposals < budget) {
      ++report.proposals;
      MixedProfile q = propose(around, only_slot);
      if (counters(game, q, p)) {
        out = std::move(q);
        return true;
      }
    }
    return false;
  };

  for (std::size_t t = 0; t < num_samples; ++t) {
    MixedProfile r, s;
    if (!draw_countering(p, SIZE_MAX, r)) {
      report.shortfall = num_samples - t;
      break;
    }
    if (mode == CombinationMode::JointProfile) {
      if (!draw_countering(p, SIZE_MAX, s)) {
        report.shortfall = num_samples - t;
        break;
      }
    } else {
      const std::size_t slot = std::uniform_int_distribution<std::size_t>(
          0, game.num_players() - 1)(rng);
      // Vary only `slot` around r.
      bool ok = false;
      while (report.proposals < budget) {
        ++report.proposals;
        MixedProfile q = r;
        q.distributions[slot] = sample_simplex(q.distributions[slot].size(), rng);
        const double lambda = std::pow(unit(rng), 3.0);
        for (std::size_t k = 0; k < q.distributions[slot].size(); ++k)
          q.distributions[slot][k] =
              lambda * q.distributions[slot][k] + (1.0 - lambda) * r.distributions[slot][k];
        if (counters(game, q, p)) {
          s = std::move(q);
          ok = true;
          break;
        }
      }
      if (!ok) {
        report.shortfall = num_samples - t;
        break;
      }
    }
    const double mu = unit(rng);
    const auto mixed = expected_payoffs(game, mix_profiles(r, s, mu));
    double violation = 0.0;
    for (std::size_t i = 0; i < mixed.size(); ++i)
      violation = std::max(violation, base[i] - mixed[i]);
    if (violation > kDefaultTolerances.counters_slack) {
      ++report.failures;
      report.worst_violation = std::max(report.worst_violation, violation);
    } else {
      ++report.passes;
    }
  }
  return report;
}

}  // namespace qnash
