#pragma once

// Command-line driver. Exit codes: 0 success or accepted, 1 domain failure or
// rejection, 2 usage error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qnash/applications.hpp"
#include "qnash/classical.hpp"
#include "qnash/geometry.hpp"
#include "qnash/io.hpp"
#include "qnash/quantum.hpp"

namespace qnash {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

namespace cli_detail {

inline ComplexPreorder parse_preorder(const std::string& s) {
  if (s == "magnitude") return ComplexPreorder::Magnitude;
  if (s == "lex") return ComplexPreorder::Lexicographic;
  return ComplexPreorder::RealPart;
}

inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") out << content;
  else write_file_atomic(path, content);
}

struct Options {
  std::string input, out, play, trace, game, sample = "sphere";
  std::uint64_t seed = 0;
  double epsilon = 1e-6;
  double tol = 1e-10;
  std::size_t max_iter = 500;
  std::string preorder = "real";
  std::size_t resolution = 32;
  std::size_t probes = 64;
  std::size_t count = 1000;
  std::size_t boundary_samples = 20000;
  std::size_t starts = 20;
  std::size_t n_qubits = 2, target = 3, player_qubits = 1, iterations = 1;
  double s = 0.5;
};

inline int solve(const Options& o, std::ostream& out) {
  const AnyGame game = parse_game(read_file(o.input));
  Json doc{{"kind", "equilibria"}, {"schema_version", kSchemaVersion}};
  if (const auto* f = std::get_if<FiniteGame>(&game)) {
    Json list = Json::array();
    for (const auto& c : support_enumeration_nash(*f)) list.push_back(to_json(c));
    doc["method"] = "support_enumeration";
    doc["equilibria"] = std::move(list);
  } else {
    const auto& q = std::get<QuantumGame>(game);
    const GridReport r = grid_search_pure_nash(q, o.resolution, o.epsilon, parse_preorder(o.preorder));
    Json list = Json::array();
    for (const auto& w : r.witnesses)
      list.push_back(Json{{"grid_index", {w.index0, w.index1}}, {"max_gain", w.max_gain}, {"play", to_json(w.play)}});
    doc["method"] = "grid_search";
    doc["resolution"] = r.resolution;
    doc["epsilon"] = r.epsilon;
    doc["total_plays"] = r.total_plays;
    doc["accepted"] = r.accepted;
    doc["min_max_gain"] = r.min_max_gain;
    doc["best_payoff"] = r.best_payoff;
    doc["equilibria"] = std::move(list);
  }
  emit(o.out, dump_json(doc), out);
  return kExitOk;
}

inline int dynamics(const Options& o, std::ostream& out) {
  const QuantumGame game = quantum_game_from_json(parse_json(read_file(o.input)));
  const ProductPlay start = o.play.empty() ? random_play(game, o.seed) : play_from_json(parse_json(read_file(o.play)));
  const DynamicsOutcome r =
      iterated_best_response(game, start, {.tol = o.tol, .max_iter = o.max_iter, .preorder = parse_preorder(o.preorder)});
  if (!o.trace.empty()) emit(o.trace, trace_csv(r, game.num_players()), out);
  emit(o.out, dump_json(to_json(r)), out);
  return kExitOk;
}

inline int verify(const Options& o, std::ostream& out) {
  const AnyGame game = parse_game(read_file(o.input));
  if (o.play.empty()) throw Error("verify needs --play");
  const Json play_doc = parse_json(read_file(o.play));
  if (const auto* f = std::get_if<FiniteGame>(&game)) {
    const NashVerdict v = is_epsilon_nash(*f, profile_from_json(play_doc), o.epsilon);
    Json doc{{"accepted", accepted(v)}};
    std::visit([&](const auto& x) {
      doc["epsilon"] = x.epsilon;
      doc["per_player_gain"] = x.per_player_gain;
      doc["profile"] = x.profile.distributions;
    }, v);
    if (const auto* r = std::get_if<NashRejection>(&v)) doc["worst_player"] = r->worst_player;
    emit(o.out, dump_json(doc), out);
    return accepted(v) ? kExitOk : kExitDomain;
  }
  const QuantumVerdict v = verify_epsilon_nash_quantum(std::get<QuantumGame>(game), play_from_json(play_doc),
                                                       o.epsilon, o.probes, o.seed, parse_preorder(o.preorder));
  emit(o.out, dump_json(to_json(v)), out);
  return accepted(v) ? kExitOk : kExitDomain;
}

inline std::vector<Point3> geometry_points(const Options& o) {
  if (!o.input.empty()) return parse_point_cloud_csv(read_file(o.input));
  if (o.sample == "sphere") return sample_bloch_sphere(o.count, o.seed);
  if (o.sample == "hemisphere") return sample_bloch_sphere(o.count, o.seed, true);
  return regular_tetrahedron();
}

inline int geometry(const Options& o, std::ostream& out) {
  const auto pts = geometry_points(o);
  const ConvexHull hull = convex_hull(pts);
  const ExtremeReport ext = extreme_points(hull, pts);

  // Retract check on the input points lying on the closed upper unit
  // hemisphere: those must be fixed.
  std::size_t upper = 0;
  double fixed_error = 0.0;
  for (const auto& p : pts) {
    if (p.z() < 0.0 || std::abs(p.norm() - 1.0) > 1e-12) continue;
    ++upper;
    fixed_error = std::max(fixed_error, (hemisphere_retract(Eigen::VectorXd(p)) - Eigen::VectorXd(p)).norm());
  }

  Json doc{{"kind", "geometry_report"}, {"schema_version", kSchemaVersion}};
  doc["points"] = pts.size();
  doc["hull"] = Json{{"vertices", hull.vertices.size()},
                     {"facets", hull.facets.size()},
                     {"surface_area", hull.surface_area()}};
  doc["extreme"] = Json{{"count", ext.extreme_count},
                        {"distinct_points", ext.distinct_vertices},
                        {"fraction", ext.fraction()}};
  doc["retract"] = Json{{"upper_hemisphere_points", upper}, {"max_fixed_error", fixed_error}};
  doc["coincidence"] = to_json(boundary_coincidence_check(pts, o.seed, o.boundary_samples));
  emit(o.out, dump_json(doc), out);
  return kExitOk;
}

inline int build(const Options& o, std::ostream& out) {
  const std::string& g = o.game;
  std::string text;
  if (g == "matching-pennies") text = dump_json(to_json(demos::matching_pennies()));
  else if (g == "prisoners-dilemma") text = dump_json(to_json(demos::prisoners_dilemma()));
  else if (g == "bell") text = dump_json(to_json(demos::bell_preparation_game()));
  else if (g == "observable-demo") text = dump_json(to_json(demos::observable_demo_game()));
  else if (g == "overlap-twin") text = dump_json(to_json(demos::observable_demo_overlap_twin()));
  else if (g == "grover")
    text = dump_json(to_json(build_grover_game(o.n_qubits, o.target, {o.player_qubits, o.n_qubits - o.player_qubits},
                                               o.iterations)));
  else if (g == "schedule") text = dump_json(to_json(demos::two_qubit_schedule()));
  else if (g == "adiabatic") {
    const AdiabaticSchedule sched =
        o.input.empty() ? demos::two_qubit_schedule() : schedule_from_json(parse_json(read_file(o.input)));
    text = dump_json(to_json(build_adiabatic_game(sched, o.s)));
  } else {
    throw Error("unknown game \"" + g + "\"");
  }
  emit(o.out, text, out);
  return kExitOk;
}

inline int sweep(const Options& o, std::ostream& out) {
  const AdiabaticSchedule sched =
      o.input.empty() ? demos::two_qubit_schedule() : schedule_from_json(parse_json(read_file(o.input)));
  const auto rows = sweep_adiabatic(sched, {.starts_per_s = o.starts,
                                            .tol = o.tol,
                                            .max_iter = o.max_iter,
                                            .epsilon = o.epsilon,
                                            .probes = 0,
                                            .seed = o.seed});
  emit(o.out, sweep_csv(rows), out);
  return kExitOk;
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  using cli_detail::Options;
  Options o;
  CLI::App app{"Equilibria of classical and pure-strategy quantum games", "qnash"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub, bool needs_input) {
    auto* in = sub->add_option("--input,-i", o.input, "input document");
    if (needs_input) in->required();
    sub->add_option("--out,-o", o.out, "output path (stdout if omitted)");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--epsilon", o.epsilon, "epsilon for Nash checks");
    sub->add_option("--tol", o.tol, "convergence tolerance");
    sub->add_option("--max-iter", o.max_iter, "sweep limit");
    sub->add_option("--preorder", o.preorder, "complex payoff preorder")
        ->check(CLI::IsMember({"real", "magnitude", "lex"}));
    sub->add_option("--resolution", o.resolution, "grid resolution per angle")
        ->check(CLI::Range(std::size_t{2}, kMaxGridResolution));
  };

  auto* solve = app.add_subcommand("solve", "equilibria of a finite game (support enumeration) or a two-qubit game (grid)");
  common(solve, true);
  auto* dyn = app.add_subcommand("dynamics", "iterated best response on a quantum game");
  common(dyn, true);
  dyn->add_option("--play", o.play, "start play document (Haar-random from --seed if omitted)");
  dyn->add_option("--trace", o.trace, "trace CSV path");
  auto* ver = app.add_subcommand("verify", "epsilon-Nash check of a play or mixed profile");
  common(ver, true);
  ver->add_option("--play", o.play, "play or profile document")->required();
  ver->add_option("--probes", o.probes, "random unilateral deviations per player");
  auto* geo = app.add_subcommand("geometry", "hull, retract and boundary-coincidence report for a point cloud");
  common(geo, false);
  geo->add_option("--sample", o.sample, "generated cloud when --input is absent")
      ->check(CLI::IsMember({"sphere", "hemisphere", "tetrahedron"}));
  geo->add_option("--count", o.count, "generated point count");
  geo->add_option("--boundary-samples", o.boundary_samples, "hull boundary samples for the coincidence test");
  auto* bld = app.add_subcommand("build", "emit a bundled or application game document");
  common(bld, false);
  bld->add_option("--game", o.game, "game to build")
      ->required()
      ->check(CLI::IsMember({"matching-pennies", "prisoners-dilemma", "bell", "observable-demo", "overlap-twin",
                             "grover", "adiabatic", "schedule"}));
  bld->add_option("--qubits", o.n_qubits, "grover: total qubits");
  bld->add_option("--target", o.target, "grover: marked basis index");
  bld->add_option("--player-qubits", o.player_qubits, "grover: qubits held by the player");
  bld->add_option("--iterations", o.iterations, "grover: iterate count");
  bld->add_option("--s", o.s, "adiabatic: interpolation parameter")->check(CLI::Range(0.0, 1.0));
  auto* swp = app.add_subcommand("sweep", "adiabatic equilibrium sweep (bundled schedule if --input is absent)");
  common(swp, false);
  swp->add_option("--starts", o.starts, "random starts per s value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*solve) return cli_detail::solve(o, out);
    if (*dyn) return cli_detail::dynamics(o, out);
    if (*ver) return cli_detail::verify(o, out);
    if (*geo) return cli_detail::geometry(o, out);
    if (*bld) return cli_detail::build(o, out);
    return cli_detail::sweep(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}

}  // namespace qnash
