#pragma once

// JSON game documents, CSV tables and atomic file output.
//
// Every document is an object with "kind" and "schema_version". Complex
// numbers are [re, im] pairs, matrices are row-major nested arrays, and reals
// are written in the shortest form that parses back to the same double.

#include <Eigen/Dense>

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include <unistd.h>

#include "json.hpp"

#include "qnash/applications.hpp"
#include "qnash/classical.hpp"
#include "qnash/config.hpp"
#include "qnash/errors.hpp"
#include "qnash/geometry.hpp"
#include "qnash/quantum.hpp"
#include "qnash/tensor.hpp"

namespace qnash {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class DocumentErrorKind { Malformed, Schema, Invariant };

inline const char* to_string(DocumentErrorKind k) {
  switch (k) {
    case DocumentErrorKind::Malformed: return "malformed";
    case DocumentErrorKind::Schema: return "schema";
    case DocumentErrorKind::Invariant: return "invariant";
  }
  return "unknown";
}

class DocumentError : public Error {
 public:
  DocumentError(DocumentErrorKind kind, std::string path, const std::string& detail)
      : Error(std::string(to_string(kind)) + " error at " + path + ": " + detail),
        kind_(kind),
        path_(std::move(path)) {}

  DocumentErrorKind kind() const { return kind_; }
  const std::string& path() const { return path_; }

 private:
  DocumentErrorKind kind_;
  std::string path_;
};

namespace detail {

[[noreturn]] inline void schema_error(const std::string& path, const std::string& what) {
  throw DocumentError(DocumentErrorKind::Schema, path, what);
}

[[noreturn]] inline void invariant_error(const std::string& path, const std::string& what) {
  throw DocumentError(DocumentErrorKind::Invariant, path, what);
}

inline std::string at(const std::string& path, std::size_t k) { return path + "[" + std::to_string(k) + "]"; }
inline std::string at(const std::string& path, std::string_view key) { return path + "." + std::string(key); }

inline const Json& field(const Json& obj, const std::string& path, std::string_view key) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(std::string(key));
  if (it == obj.end()) schema_error(at(path, key), "missing field");
  return *it;
}

inline const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
  return j;
}

inline double real(const Json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) invariant_error(path, "non-finite number");
  return x;
}

inline std::size_t count(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    schema_error(path, "expected a non-negative integer");
  return j.get<std::size_t>();
}

inline std::vector<std::size_t> counts(const Json& j, const std::string& path) {
  std::vector<std::size_t> out;
  std::size_t k = 0;
  for (const auto& e : array(j, path)) out.push_back(count(e, at(path, k++)));
  return out;
}

inline std::vector<double> reals(const Json& j, const std::string& path) {
  std::vector<double> out;
  std::size_t k = 0;
  for (const auto& e : array(j, path)) out.push_back(real(e, at(path, k++)));
  return out;
}

inline Complex complex(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) schema_error(path, "expected a [re, im] pair");
  return {real(j[0], at(path, 0)), real(j[1], at(path, 1))};
}

inline CVector cvector(const Json& j, const std::string& path) {
  array(j, path);
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<Eigen::Index>(k)] = complex(j[k], at(path, k));
  return v;
}

inline CMatrix cmatrix(const Json& j, const std::string& path) {
  array(j, path);
  const std::size_t rows = j.size();
  if (rows == 0) schema_error(path, "empty matrix");
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = at(path, r);
    if (!array(j[r], rp).is_array() || j[r].size() != rows) schema_error(rp, "matrix must be square");
    for (std::size_t c = 0; c < rows; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex(j[r][c], at(rp, c));
  }
  return m;
}

// Accepts vectors within the auto-normalization window and renormalizes them
// exactly; anything further from unit norm is rejected.
inline PureState state(const Json& j, const std::string& path, std::size_t expected_dim) {
  const CVector v = cvector(j, path);
  if (static_cast<std::size_t>(v.size()) != expected_dim)
    schema_error(path, "expected " + std::to_string(expected_dim) + " amplitudes, found " +
                           std::to_string(v.size()));
  const double n = v.norm();
  if (!(std::abs(n - 1.0) <= kDefaultTolerances.target_autonormalize))
    invariant_error(path, "state norm " + std::to_string(n) + " is not 1");
  return canonicalize_phase(v);
}

inline void check_header(const Json& doc, std::string_view kind) {
  const Json& k = field(doc, "$", "kind");
  if (!k.is_string()) schema_error("$.kind", "expected a string");
  if (k.get<std::string>() != kind)
    schema_error("$.kind", "expected \"" + std::string(kind) + "\", found \"" + k.get<std::string>() + "\"");
  const Json& v = field(doc, "$", "schema_version");
  if (!v.is_number_integer() || v.get<long long>() != kSchemaVersion)
    schema_error("$.schema_version", "unsupported schema version");
}

inline Json header(std::string_view kind) {
  return Json{{"kind", std::string(kind)}, {"schema_version", kSchemaVersion}};
}

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json cvector_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(complex_json(v[k]));
  return out;
}

inline Json cmatrix_json(const CMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

// Row-major tensor <-> nested arrays of depth counts.size().
inline Json nest(const std::vector<double>& flat, const std::vector<std::size_t>& counts, std::size_t level,
                 std::size_t& cursor) {
  Json out = Json::array();
  for (std::size_t k = 0; k < counts[level]; ++k) {
    if (level + 1 == counts.size()) out.push_back(flat[cursor++]);
    else out.push_back(nest(flat, counts, level + 1, cursor));
  }
  return out;
}

inline void flatten(const Json& j, const std::vector<std::size_t>& counts, std::size_t level,
                    const std::string& path, std::vector<double>& out) {
  array(j, path);
  if (j.size() != counts[level])
    schema_error(path, "expected " + std::to_string(counts[level]) + " entries, found " +
                           std::to_string(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (level + 1 == counts.size()) out.push_back(real(j[k], at(path, k)));
    else flatten(j[k], counts, level + 1, at(path, k), out);
  }
}

// Runs a domain constructor, reporting its invariant failures at `path`.
template <class F>
auto guarded(const std::string& path, F&& build) {
  try {
    return build();
  } catch (const DocumentError&) {
    throw;
  } catch (const Error& e) {
    invariant_error(path, e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Text <-> JSON

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw DocumentError(DocumentErrorKind::Malformed, "$", e.what());
  }
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

inline std::string document_kind(const Json& doc) {
  const Json& k = detail::field(doc, "$", "kind");
  if (!k.is_string()) detail::schema_error("$.kind", "expected a string");
  return k.get<std::string>();
}

// ---------------------------------------------------------------------------
// Finite games and profiles

inline Json to_json(const FiniteGame& g) {
  Json doc = detail::header("finite");
  doc["strategy_counts"] = g.strategy_counts();
  Json payoffs = Json::array();
  for (std::size_t i = 0; i < g.num_players(); ++i) {
    std::size_t cursor = 0;
    payoffs.push_back(detail::nest(g.payoff_tensor(i), g.strategy_counts(), 0, cursor));
  }
  doc["payoffs"] = std::move(payoffs);
  return doc;
}

inline FiniteGame finite_game_from_json(const Json& doc) {
  detail::check_header(doc, "finite");
  const auto counts = detail::counts(detail::field(doc, "$", "strategy_counts"), "$.strategy_counts");
  if (counts.empty()) detail::schema_error("$.strategy_counts", "at least one player required");
  for (std::size_t k = 0; k < counts.size(); ++k)
    if (counts[k] < 1) detail::invariant_error(detail::at("$.strategy_counts", k), "strategy count must be >= 1");
  const Json& payoffs = detail::array(detail::field(doc, "$", "payoffs"), "$.payoffs");
  if (payoffs.size() != counts.size())
    detail::schema_error("$.payoffs", "one payoff tensor per player required");
  std::vector<std::vector<double>> tensors;
  for (std::size_t i = 0; i < payoffs.size(); ++i) {
    std::vector<double> flat;
    detail::flatten(payoffs[i], counts, 0, detail::at("$.payoffs", i), flat);
    tensors.push_back(std::move(flat));
  }
  return detail::guarded("$", [&] { return FiniteGame(counts, std::move(tensors)); });
}

inline Json to_json(const MixedProfile& p) {
  Json doc = detail::header("profile");
  doc["distributions"] = p.distributions;
  return doc;
}

inline MixedProfile profile_from_json(const Json& doc) {
  detail::check_header(doc, "profile");
  const Json& d = detail::array(detail::field(doc, "$", "distributions"), "$.distributions");
  MixedProfile p;
  for (std::size_t i = 0; i < d.size(); ++i) p.distributions.push_back(detail::reals(d[i], detail::at("$.distributions", i)));
  return p;
}

// ---------------------------------------------------------------------------
// Quantum games and plays

inline Json payoff_json(const PayoffSpec& spec) {
  if (const auto* o = std::get_if<OverlapPayoff>(&spec))
    return Json{{"overlap", detail::cvector_json(o->target.amplitudes())}};
  return Json{{"observable", std::get<ObservablePayoff>(spec).eigenvalues}};
}

inline Json to_json(const QuantumGame& g) {
  Json doc = detail::header("quantum");
  doc["dims"] = g.dims();
  doc["unitary"] = detail::cmatrix_json(g.unitary().matrix());
  Json payoffs = Json::array();
  for (const auto& p : g.payoffs()) payoffs.push_back(payoff_json(p));
  doc["payoffs"] = std::move(payoffs);
  return doc;
}

inline QuantumGame quantum_game_from_json(const Json& doc) {
  detail::check_header(doc, "quantum");
  const auto dims = detail::counts(detail::field(doc, "$", "dims"), "$.dims");
  if (dims.size() < 2) detail::invariant_error("$.dims", "at least two players required");
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (dims[k] < 2) detail::invariant_error(detail::at("$.dims", k), "qudit dimension must be >= 2");
  const std::size_t total = joint_dimension(dims);

  const CMatrix m = detail::cmatrix(detail::field(doc, "$", "unitary"), "$.unitary");
  if (static_cast<std::size_t>(m.rows()) != total)
    detail::schema_error("$.unitary", "dimension " + std::to_string(m.rows()) + " does not match dims product " +
                                          std::to_string(total));
  UnitaryOperator q = detail::guarded("$.unitary", [&] { return UnitaryOperator::checked(m); });

  const Json& payoffs = detail::array(detail::field(doc, "$", "payoffs"), "$.payoffs");
  if (payoffs.size() != dims.size()) detail::schema_error("$.payoffs", "one payoff specification per player required");
  std::vector<PayoffSpec> specs;
  for (std::size_t i = 0; i < payoffs.size(); ++i) {
    const std::string path = detail::at("$.payoffs", i);
    const Json& p = payoffs[i];
    if (!p.is_object() || p.size() != 1) detail::schema_error(path, "expected {\"overlap\": ...} or {\"observable\": ...}");
    if (p.contains("overlap")) {
      specs.emplace_back(OverlapPayoff{detail::state(p["overlap"], path + ".overlap", total)});
    } else if (p.contains("observable")) {
      auto e = detail::reals(p["observable"], path + ".observable");
      if (e.size() != total)
        detail::schema_error(path + ".observable", "expected " + std::to_string(total) + " eigenvalues");
      specs.emplace_back(ObservablePayoff{std::move(e)});
    } else {
      detail::schema_error(path, "unknown payoff variant");
    }
  }
  return detail::guarded("$", [&] { return QuantumGame(dims, std::move(q), std::move(specs)); });
}

inline Json to_json(const ProductPlay& play) {
  Json doc = detail::header("play");
  Json factors = Json::array();
  for (const auto& f : play.factors()) factors.push_back(detail::cvector_json(f.amplitudes()));
  doc["factors"] = std::move(factors);
  return doc;
}

inline ProductPlay play_from_json(const Json& doc) {
  detail::check_header(doc, "play");
  const Json& f = detail::array(detail::field(doc, "$", "factors"), "$.factors");
  std::vector<PureState> factors;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::string path = detail::at("$.factors", i);
    detail::array(f[i], path);
    factors.push_back(detail::state(f[i], path, f[i].size()));
  }
  return ProductPlay(std::move(factors));
}

// ---------------------------------------------------------------------------
// Adiabatic schedules

inline Json to_json(const AdiabaticSchedule& s) {
  Json doc = detail::header("adiabatic_schedule");
  doc["dims"] = s.dims;
  doc["h_initial"] = detail::cmatrix_json(s.h_initial.matrix());
  doc["h_final"] = detail::cmatrix_json(s.h_final.matrix());
  doc["s_values"] = s.s_values;
  doc["t"] = s.t;
  return doc;
}

inline AdiabaticSchedule schedule_from_json(const Json& doc) {
  detail::check_header(doc, "adiabatic_schedule");
  auto dims = detail::counts(detail::field(doc, "$", "dims"), "$.dims");
  auto hermitian = [&](std::string_view key) {
    const std::string path = detail::at("$", key);
    const CMatrix m = detail::cmatrix(detail::field(doc, "$", key), path);
    return detail::guarded(path, [&] { return HermitianOperator::checked(m); });
  };
  HermitianOperator hi = hermitian("h_initial");
  HermitianOperator hf = hermitian("h_final");
  auto s_values = detail::reals(detail::field(doc, "$", "s_values"), "$.s_values");
  const double t = detail::real(detail::field(doc, "$", "t"), "$.t");
  AdiabaticSchedule schedule{std::move(dims), std::move(hi), std::move(hf), std::move(s_values), t};
  detail::guarded("$", [&] {
    schedule.validate();
    return 0;
  });
  return schedule;
}

// ---------------------------------------------------------------------------
// Game documents

using AnyGame = std::variant<FiniteGame, QuantumGame>;

inline AnyGame parse_game(std::string_view text) {
  const Json doc = parse_json(text);
  const std::string kind = document_kind(doc);
  if (kind == "finite") return finite_game_from_json(doc);
  if (kind == "quantum") return quantum_game_from_json(doc);
  detail::schema_error("$.kind", "expected \"finite\" or \"quantum\", found \"" + kind + "\"");
}

inline std::string serialize_game(const FiniteGame& g) { return dump_json(to_json(g)); }
inline std::string serialize_game(const QuantumGame& g) { return dump_json(to_json(g)); }
inline std::string serialize_game(const AnyGame& g) {
  return std::visit([](const auto& x) { return serialize_game(x); }, g);
}

// ---------------------------------------------------------------------------
// Files and CSV

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to a sibling temporary file and renames it over the destination.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

// Shortest round-trip decimal form.
inline std::string format_real(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string csv_line(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) line += ',';
    line += cells[k];
  }
  return line + "\n";
}

inline std::vector<Point3> parse_point_cloud_csv(std::string_view text) {
  std::vector<Point3> pts;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (line == "x,y,z") continue;
    }
    std::array<double, 3> xyz{};
    std::size_t pos = 0;
    for (int c = 0; c < 3; ++c) {
      const std::size_t end = c < 2 ? line.find(',', pos) : line.size();
      if (end == std::string::npos)
        throw DocumentError(DocumentErrorKind::Schema, "line " + std::to_string(lineno), "expected x,y,z");
      const char* first = line.data() + pos;
      const char* last = line.data() + end;
      auto res = std::from_chars(first, last, xyz[c]);
      if (res.ec != std::errc() || res.ptr != last || !std::isfinite(xyz[c]))
        throw DocumentError(DocumentErrorKind::Schema, "line " + std::to_string(lineno), "bad number");
      pos = end + 1;
    }
    pts.emplace_back(xyz[0], xyz[1], xyz[2]);
  }
  return pts;
}

inline std::string point_cloud_csv(std::span<const Point3> pts) {
  std::string out = "x,y,z\n";
  for (const auto& p : pts) out += csv_line({format_real(p.x()), format_real(p.y()), format_real(p.z())});
  return out;
}

inline std::string trace_csv(const DynamicsOutcome& outcome, std::size_t num_players) {
  std::vector<std::string> head{"iteration"};
  for (std::size_t i = 0; i < num_players; ++i) {
    head.push_back("payoff_player" + std::to_string(i + 1) + "_re");
    head.push_back("payoff_player" + std::to_string(i + 1) + "_im");
  }
  head.push_back("step");
  std::string out = csv_line(head);
  for (const auto& row : outcome.trace) {
    std::vector<std::string> cells{std::to_string(row.iteration)};
    for (const auto& z : row.payoffs) {
      cells.push_back(format_real(z.real()));
      cells.push_back(format_real(z.imag()));
    }
    cells.push_back(format_real(row.step));
    out += csv_line(cells);
  }
  return out;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "s,start_id,outcome,iterations,payoff_player1_re,payoff_player1_im,ground_overlap_magnitude\n";
  for (const auto& r : rows)
    out += csv_line({format_real(r.s), std::to_string(r.start_id), r.outcome, std::to_string(r.iterations),
                     format_real(r.payoff_player1.real()), format_real(r.payoff_player1.imag()),
                     format_real(r.ground_overlap_magnitude)});
  return out;
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const EquilibriumCertificate& c) {
  return Json{{"profile", c.profile.distributions}, {"epsilon", c.epsilon}, {"per_player_gain", c.per_player_gain}};
}

inline Json to_json(const QuantumVerdict& v) {
  const auto& e = evidence(v);
  Json out{{"accepted", accepted(v)},
           {"epsilon", e.epsilon},
           {"per_player_gain", e.per_player_gain},
           {"probe_gain", e.probe_gain},
           {"play", to_json(e.play)}};
  if (const auto* r = std::get_if<QuantumRejection>(&v)) out["worst_player"] = r->worst_player;
  return out;
}

inline Json payoffs_json(const std::vector<Complex>& zs) {
  Json out = Json::array();
  for (const auto& z : zs) out.push_back(detail::complex_json(z));
  return out;
}

inline Json to_json(const DynamicsOutcome& o) {
  Json out{{"outcome", o.kind()}, {"iterations", o.iterations()}, {"final_play", to_json(o.final_play())}};
  if (const auto* c = std::get_if<CycleDetected>(&o.result)) {
    out["period"] = c->period;
    Json w = Json::array();
    for (const auto& p : c->witness) w.push_back(to_json(p));
    out["witness"] = std::move(w);
  }
  if (!o.trace.empty()) {
    out["final_payoffs"] = payoffs_json(o.trace.back().payoffs);
    out["final_step"] = o.trace.back().step;
  }
  return out;
}

inline Json to_json(const CoincidenceReport& r) {
  return Json{{"fraction", r.fraction},       {"boundary_samples", r.boundary_samples},
              {"hull_vertices", r.hull_vertices}, {"hull_facets", r.hull_facets},
              {"delta", r.delta},             {"coincident", r.coincident},
              {"verdict", r.verdict}};
}

}  // namespace qnash
