// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <unsupported/Eigen/MatrixFunctions>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "qnash/qnash.hpp"

using namespace qnash;
namespace fs = std::filesystem;

namespace {

struct Result {
  bool pass;
  std::string detail;
};

FiniteGame random_game(Rng& rng) {
  std::uniform_int_distribution<std::size_t> players(2, 3), strategies(2, 4);
  std::vector<std::size_t> counts(players(rng));
  std::size_t outcomes = 1;
  for (auto& k : counts) outcomes *= (k = strategies(rng));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> t(counts.size(), std::vector<double>(outcomes));
  for (auto& v : t)
    for (auto& x : v) x = u(rng);
  return FiniteGame(std::move(counts), std::move(t));
}

Result countering_convexity() {
  Rng rng(1001);
  std::size_t joint_fail = 0, joint_trials = 0, slot_fail = 0, slot_trials = 0, shortfall = 0;
  for (int g = 0; g < 20; ++g) {
    const FiniteGame game = random_game(rng);
    for (int b = 0; b < 5; ++b) {
      const MixedProfile p = sample_profile(game, rng);
      const std::uint64_t seed = 100 * g + b;
      const auto joint = verify_countering_convexity(game, p, 500, seed, CombinationMode::JointProfile);
      joint_fail += joint.failures;
      joint_trials += joint.passes + joint.failures;
      shortfall += joint.shortfall;
      const auto slot = verify_countering_convexity(game, p, 500, seed, CombinationMode::SingleSlot);
      slot_fail += slot.failures;
      slot_trials += slot.passes + slot.failures;
      shortfall += slot.shortfall;
    }
  }
  std::ostringstream os;
  os << "joint-profile combinations: " << joint_fail << " of " << joint_trials
     << " fail; single-slot combinations: " << slot_fail << " of " << slot_trials << " fail";
  if (shortfall) os << "; " << shortfall << " trials unformed";
  return {joint_fail == 0 && slot_fail == 0 && shortfall == 0, os.str()};
}

Result classical_oracle() {
  const auto mp = support_enumeration_nash(demos::matching_pennies());
  const auto pd = support_enumeration_nash(demos::prisoners_dilemma());
  bool ok = mp.size() == 1 && pd.size() == 1;
  if (ok) {
    for (const auto& d : mp[0].profile.distributions)
      for (double x : d) ok = ok && std::abs(x - 0.5) <= 1e-10;
    for (const auto& d : pd[0].profile.distributions) ok = ok && d == std::vector<double>{0.0, 1.0};
    ok = ok && accepted(is_epsilon_nash(demos::matching_pennies(), mp[0].profile, 1e-8)) &&
         accepted(is_epsilon_nash(demos::prisoners_dilemma(), pd[0].profile, 1e-8));
  }
  return {ok, "matching pennies: " + std::to_string(mp.size()) + " equilibrium, prisoner's dilemma: " +
                  std::to_string(pd.size()) + " equilibrium"};
}

Result linear_guarantee() {
  const QuantumGame game = demos::bell_preparation_game();
  std::size_t converged = 0, verified = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto out = iterated_best_response(game, random_play(game, seed), {.max_iter = 500});
    if (!out.converged()) continue;
    ++converged;
    if (accepted(verify_epsilon_nash_quantum(game, out.final_play(), 1e-6, 64, seed))) ++verified;
  }
  return {converged >= 99 && verified == converged,
          std::to_string(converged) + "/100 converged, " + std::to_string(verified) + " verified"};
}

Result analytic_vs_oracle() {
  Rng rng(1004);
  double worst_response = 0.0, worst_optimum = 0.0;
  for (int k = 0; k < 10; ++k) {
    const QuantumGame game({2, 2}, haar_random_unitary(4, rng),
                           {OverlapPayoff{haar_random_state(4, rng)}, OverlapPayoff{haar_random_state(4, rng)}});
    // Unilateral: analytic best response against a random opponent.
    const ProductPlay play = haar_random_play(game.dims(), rng);
    for (std::size_t i = 0; i < 2; ++i) {
      const double analytic = aligned_value(game, play.with_factor(i, best_response_overlap(game, play, i)), i);
      worst_response = std::max(worst_response, std::abs(analytic - grid_best_response_value(game, play, i, 64)));
    }
    // Joint: the best grid payoff against the analytic optimum, reached by
    // best-responding to the top singular partner of the payoff bilinear form.
    const GridReport report = grid_search_pure_nash(game, 64);
    for (std::size_t i = 0; i < 2; ++i) {
      const CVector w = game.unitary().matrix().adjoint() * overlap_spec(game, i).target.amplitudes();
      CMatrix a(2, 2);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) a(r, c) = std::conj(w[2 * r + c]);
      Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const CVector top = i == 0 ? CVector(svd.matrixV().col(0)) : CVector(svd.matrixU().col(0).conjugate());
      const PureState partner = canonicalize_phase(top, kDefaultTolerances);
      const ProductPlay seed_play = i == 0 ? ProductPlay({basis_state(2, 0), partner})
                                           : ProductPlay({partner, basis_state(2, 0)});
      const double optimum =
          aligned_value(game, seed_play.with_factor(i, best_response_overlap(game, seed_play, i)), i);
      worst_optimum = std::max(worst_optimum, std::abs(optimum - svd.singularValues()[0]));
      worst_optimum = std::max(worst_optimum, std::abs(optimum - report.best_payoff[i]));
    }
  }
  std::ostringstream os;
  os << "max |analytic - grid| best response " << worst_response << ", joint optimum " << worst_optimum;
  return {worst_response <= 1e-3 && worst_optimum <= 1e-3, os.str()};
}

Result nonlinearity() {
  const auto witness = demos::observable_nonlinearity_witness();
  const double gap = witness.gap();
  const QuantumGame demo = demos::observable_demo_game();
  const GridReport grid = grid_search_pure_nash(demo, 32, 0.05);
  const QuantumGame twin = demos::observable_demo_overlap_twin();
  const bool same_q = twin.unitary().matrix() == demo.unitary().matrix();
  const auto out = iterated_best_response(twin, random_play(twin, 0));
  const bool twin_ok = out.converged() && accepted(verify_epsilon_nash_quantum(twin, out.final_play(), 1e-6, 64, 0));
  std::ostringstream os;
  os << "witness gap " << gap << "; observable demo: " << grid.accepted << " of " << grid.total_plays
     << " grid plays accepted (min max gain " << grid.min_max_gain << "); overlap twin "
     << (twin_ok ? "verified" : "not verified");
  return {std::abs(gap) > 0.1 && grid.accepted == 0 && same_q && twin_ok, os.str()};
}

Result isometry() {
  Rng rng(1006);
  std::vector<std::pair<PureState, PureState>> pairs;
  for (int k = 0; k < 1000; ++k) pairs.emplace_back(haar_random_state(2, rng), haar_random_state(2, rng));
  const auto r = isometry_check(pairs);
  std::ostringstream os;
  os << "max deviation " << r.max_deviation << " over " << r.pairs << " pairs";
  return {r.pairs == 1000 && r.max_deviation <= 1e-9, os.str()};
}

Result retract() {
  Rng rng(1007);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double fixed = 0.0, sphere = 0.0;
  bool idempotent = true;
  for (int k = 0; k < 1000; ++k) {
    Eigen::VectorXd p(3);
    p << n(rng), n(rng), n(rng);
    p.normalize();
    p[2] = std::abs(p[2]);
    fixed = std::max(fixed, (hemisphere_retract(p) - p).norm());

    Eigen::VectorXd b(3);
    b << n(rng), n(rng), n(rng);
    b *= std::cbrt(u(rng)) / b.norm();
    const Eigen::VectorXd r = hemisphere_retract(b);
    sphere = std::max(sphere, std::abs(r.norm() - 1.0));
    idempotent = idempotent && hemisphere_retract(r) == r;
  }
  std::ostringstream os;
  os << "fixed-point error " << fixed << ", sphere norm error " << sphere << ", idempotent "
     << (idempotent ? "yes" : "no");
  return {fixed <= 1e-12 && sphere <= 1e-12 && idempotent, os.str()};
}

Result coincidence() {
  const auto full = boundary_coincidence_check(sample_bloch_sphere(10000, 1008), 1, 10000);
  const auto half = boundary_coincidence_check(sample_bloch_sphere(2000, 1009, true), 2, 10000);
  std::ostringstream os;
  os << "sphere fraction " << full.fraction << " (" << full.verdict << "), hemisphere fraction " << half.fraction;
  return {full.fraction >= 0.95 && half.fraction <= 0.7 && full.verdict == kRetractUnavailable &&
              half.verdict != kRetractUnavailable,
          os.str()};
}

Result adiabatic() {
  const AdiabaticSchedule sched = demos::two_qubit_schedule();
  const Complex minus_i_t(0.0, -sched.t);
  const CMatrix oracle_i = (minus_i_t * sched.h_initial.matrix()).exp();
  const CMatrix oracle_f = (minus_i_t * sched.h_final.matrix()).exp();
  const double err1 = max_abs_entry(build_adiabatic_game(sched, 1.0).unitary().matrix() - oracle_i);
  const double err0 = max_abs_entry(build_adiabatic_game(sched, 0.0).unitary().matrix() - oracle_f);

  const auto rows = sweep_adiabatic(sched, {});
  std::map<double, std::size_t> verified_per_s;
  for (double s : sched.s_values) verified_per_s[s] = 0;
  std::size_t verified = 0;
  for (const auto& r : rows)
    if (r.verified) ++verified, ++verified_per_s[r.s];
  std::size_t covered = 0;
  for (const auto& [s, k] : verified_per_s) covered += k > 0;
  std::ostringstream os;
  os << "endpoint errors " << err1 << " (s=1), " << err0 << " (s=0); " << verified << "/" << rows.size()
     << " sweep rows verified, " << covered << "/" << sched.s_values.size() << " s-values covered";
  return {err1 <= 1e-10 && err0 <= 1e-10 && covered == sched.s_values.size() && sched.s_values.size() == 11,
          os.str()};
}

int run_cli_to(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string("\"") + QNASH_CLI + "\" " + args + " > \"" + out.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return status;
}

Result determinism() {
  const fs::path dir = fs::temp_directory_path() / "qnash_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string data = QNASH_DATA_DIR;
  const std::vector<std::string> commands = {
      "dynamics -i \"" + data + "/observable-demo.json\" --seed 7",
      "dynamics -i \"" + data + "/bell.json\" --seed 8",
      "verify -i \"" + data + "/bell.json\" --play \"" + data + "/bell-equilibrium-play.json\" --seed 3",
      "solve -i \"" + data + "/matching-pennies.json\"",
      "geometry --sample hemisphere --count 400 --seed 4 --boundary-samples 3000",
      "sweep --starts 3 --seed 5",
      "build --game grover --qubits 3 --target 5",
  };
  std::size_t identical = 0, failed_runs = 0;
  for (std::size_t k = 0; k < commands.size(); ++k) {
    const fs::path a = dir / ("a" + std::to_string(k)), b = dir / ("b" + std::to_string(k));
    if (run_cli_to(commands[k], a) != 0 || run_cli_to(commands[k], b) != 0) ++failed_runs;
    if (read_file(a) == read_file(b) && fs::file_size(a) > 0) ++identical;
  }
  fs::remove_all(dir);

  std::size_t documents = 0, round_trips = 0;
  for (const auto& entry : fs::directory_iterator(QNASH_DATA_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++documents;
    try {
      const std::string text = read_file(entry.path());
      const Json doc = parse_json(text);
      const std::string kind = document_kind(doc);
      std::string again;
      if (kind == "finite" || kind == "quantum") again = serialize_game(parse_game(text));
      else if (kind == "play") again = dump_json(to_json(play_from_json(doc)));
      else if (kind == "profile") again = dump_json(to_json(profile_from_json(doc)));
      else if (kind == "adiabatic_schedule") again = dump_json(to_json(schedule_from_json(doc)));
      if (again == text) ++round_trips;
    } catch (const std::exception&) {
    }
  }
  std::ostringstream os;
  os << identical << "/" << commands.size() << " CLI commands byte-identical";
  if (failed_runs) os << " (" << failed_runs << " exited nonzero)";
  os << "; " << round_trips << "/" << documents << " bundled documents round-trip";
  return {identical == commands.size() && failed_runs == 0 && round_trips == documents && documents > 0, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"countering-set convexity", countering_convexity},
      {"classical equilibrium oracle", classical_oracle},
      {"linear-payoff equilibrium guarantee", linear_guarantee},
      {"analytic vs grid oracle", analytic_vs_oracle},
      {"observable-payoff nonlinearity", nonlinearity},
      {"Bloch isometry", isometry},
      {"hemisphere retract", retract},
      {"boundary coincidence", coincidence},
      {"adiabatic endpoints and sweep", adiabatic},
      {"determinism and round-trip", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Result r{false, ""};
    try {
      r = criteria[k].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %2zu %s: %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                r.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !r.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
