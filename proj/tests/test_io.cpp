#include <gtest/gtest.h>

#include <filesystem>

#include "qnash/io.hpp"

using namespace qnash;
namespace fs = std::filesystem;

namespace {

DocumentError expect_document_error(const std::string& text) {
  try {
    parse_game(text);
  } catch (const DocumentError& e) {
    return e;
  }
  ADD_FAILURE() << "document accepted: " << text;
  return DocumentError(DocumentErrorKind::Malformed, "", "");
}

std::string bundled(const std::string& name) { return read_file(fs::path(QNASH_DATA_DIR) / name); }

}  // namespace

TEST(FiniteDocumentTest, MinimalTwoByTwo) {
  const auto g = parse_game(R"({"kind": "finite", "schema_version": 1, "strategy_counts": [2, 2],
                                "payoffs": [[[1, -1], [-1, 1]], [[-1, 1], [1, -1]]]})");
  EXPECT_TRUE(std::get<FiniteGame>(g) == demos::matching_pennies());
}

TEST(FiniteDocumentTest, ThreePlayerRoundTrip) {
  const FiniteGame g({2, 3, 2}, {std::vector<double>(12, 0.5), std::vector<double>(12, -1.25),
                                 {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 0.1}});
  const auto back = parse_game(serialize_game(g));
  EXPECT_TRUE(std::get<FiniteGame>(back) == g);
}

TEST(QuantumDocumentTest, GroverRoundTripIsExact) {
  const QuantumGame g = build_grover_game(3, 6, {2, 1}, 2);
  const std::string text = serialize_game(g);
  const auto back = std::get<QuantumGame>(parse_game(text));
  EXPECT_TRUE(back == g);
  EXPECT_EQ(serialize_game(back), text);
}

TEST(QuantumDocumentTest, RandomUnitaryRoundTripIsExact) {
  Rng rng(61);
  const QuantumGame g({2, 3}, haar_random_unitary(6, rng),
                      {OverlapPayoff{haar_random_state(6, rng)}, ObservablePayoff{{0.1, -2, 3e-17, 4, 5, 1e300}}});
  EXPECT_TRUE(std::get<QuantumGame>(parse_game(serialize_game(g))) == g);
}

TEST(QuantumDocumentTest, BasisAmplitudeSerializesAsOnePointZero) {
  const ProductPlay p({basis_state(2, 0), basis_state(2, 1)});
  const Json j = to_json(p);
  EXPECT_EQ(j["factors"][0][0].dump(), "[1.0,0.0]");
}

TEST(QuantumDocumentTest, RejectsNonUnitary) {
  Json doc = to_json(demos::bell_preparation_game());
  doc["unitary"][0][0][0] = doc["unitary"][0][0][0].get<double>() + 1e-3;
  const auto e = expect_document_error(doc.dump());
  EXPECT_EQ(e.kind(), DocumentErrorKind::Invariant);
  EXPECT_EQ(e.path(), "$.unitary");
  EXPECT_NE(std::string(e.what()).find("unitarity"), std::string::npos);
}

TEST(QuantumDocumentTest, TargetNormalization) {
  Json doc = to_json(demos::bell_preparation_game());
  doc["payoffs"][1]["overlap"][0][0] = 0.7071072;  // norm off by ~5e-7: renormalized
  const auto g = std::get<QuantumGame>(parse_game(doc.dump()));
  EXPECT_NEAR(overlap_spec(g, 1).target.amplitudes().norm(), 1.0, 1e-15);

  doc["payoffs"][1]["overlap"][0][0] = 0.8;
  const auto e = expect_document_error(doc.dump());
  EXPECT_EQ(e.kind(), DocumentErrorKind::Invariant);
  EXPECT_EQ(e.path(), "$.payoffs[1].overlap");
}

TEST(QuantumDocumentTest, DistinctDiagnostics) {
  EXPECT_EQ(expect_document_error("{not json").kind(), DocumentErrorKind::Malformed);

  auto e = expect_document_error(R"({"kind": "quantum", "schema_version": 1, "dims": [2, 2]})");
  EXPECT_EQ(e.kind(), DocumentErrorKind::Schema);
  EXPECT_EQ(e.path(), "$.unitary");

  Json doc = to_json(demos::bell_preparation_game());
  doc["payoffs"][0] = Json{{"observable", {1, 2, 3}}};
  e = expect_document_error(doc.dump());
  EXPECT_EQ(e.kind(), DocumentErrorKind::Schema);
  EXPECT_EQ(e.path(), "$.payoffs[0].observable");

  doc = to_json(demos::bell_preparation_game());
  doc["unitary"][1][2] = "x";
  e = expect_document_error(doc.dump());
  EXPECT_EQ(e.path(), "$.unitary[1][2]");

  doc = to_json(demos::bell_preparation_game());
  doc["schema_version"] = 2;
  EXPECT_EQ(expect_document_error(doc.dump()).path(), "$.schema_version");

  doc["schema_version"] = 1;
  doc["kind"] = "play";
  EXPECT_EQ(expect_document_error(doc.dump()).path(), "$.kind");

  e = expect_document_error(R"({"kind": "finite", "schema_version": 1, "strategy_counts": [2, 2],
                               "payoffs": [[[1, -1], [-1]], [[-1, 1], [1, -1]]]})");
  EXPECT_EQ(e.path(), "$.payoffs[0][1]");
}

TEST(PlayDocumentTest, RoundTripAndValidation) {
  Rng rng(62);
  const ProductPlay p = haar_random_play(std::vector<std::size_t>{2, 3}, rng);
  EXPECT_TRUE(play_from_json(parse_json(dump_json(to_json(p)))) == p);
  Json bad = to_json(p);
  bad["factors"][1][0][0] = 5.0;
  EXPECT_THROW(play_from_json(bad), DocumentError);
}

TEST(ScheduleDocumentTest, RoundTripAndValidation) {
  const AdiabaticSchedule s = demos::two_qubit_schedule();
  EXPECT_TRUE(schedule_from_json(parse_json(dump_json(to_json(s)))) == s);
  Json bad = to_json(s);
  bad["s_values"] = {0.5, 0.1};
  EXPECT_THROW(schedule_from_json(bad), DocumentError);
  bad = to_json(s);
  bad["h_final"][0][1] = {0.0, 1.0};  // no longer Hermitian
  try {
    schedule_from_json(bad);
    FAIL();
  } catch (const DocumentError& e) {
    EXPECT_EQ(e.path(), "$.h_final");
  }
}

TEST(ProfileDocumentTest, RoundTrip) {
  MixedProfile p;
  p.distributions = {{0.25, 0.75}, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
  EXPECT_TRUE(profile_from_json(parse_json(dump_json(to_json(p)))) == p);
}

TEST(BundledDocumentTest, EveryDocumentRoundTripsByteForByte) {
  std::size_t checked = 0;
  for (const auto& entry : fs::directory_iterator(QNASH_DATA_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const std::string text = read_file(entry.path());
    const Json doc = parse_json(text);
    const std::string kind = document_kind(doc);
    std::string again;
    if (kind == "finite" || kind == "quantum") {
      const AnyGame g = parse_game(text);
      again = serialize_game(g);
      EXPECT_TRUE(parse_game(again) == g) << entry.path();
    } else if (kind == "play") {
      const ProductPlay p = play_from_json(doc);
      again = dump_json(to_json(p));
      EXPECT_TRUE(play_from_json(parse_json(again)) == p);
    } else if (kind == "profile") {
      const MixedProfile p = profile_from_json(doc);
      again = dump_json(to_json(p));
      EXPECT_TRUE(profile_from_json(parse_json(again)) == p);
    } else if (kind == "adiabatic_schedule") {
      const AdiabaticSchedule s = schedule_from_json(doc);
      again = dump_json(to_json(s));
      EXPECT_TRUE(schedule_from_json(parse_json(again)) == s);
    } else {
      ADD_FAILURE() << "unexpected kind " << kind << " in " << entry.path();
    }
    EXPECT_EQ(again, text) << entry.path();
    ++checked;
  }
  EXPECT_GE(checked, 11u);
}

TEST(BundledDocumentTest, GeneratedDocumentsAreCanonical) {
  EXPECT_EQ(bundled("bell.json"), serialize_game(demos::bell_preparation_game()));
  EXPECT_EQ(bundled("matching-pennies.json"), serialize_game(demos::matching_pennies()));
  EXPECT_EQ(bundled("schedule.json"), dump_json(to_json(demos::two_qubit_schedule())));
}

TEST(CsvTest, PointCloudRoundTrip) {
  const auto pts = sample_bloch_sphere(50, 63);
  const auto back = parse_point_cloud_csv(point_cloud_csv(pts));
  ASSERT_EQ(back.size(), pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) EXPECT_TRUE(back[k] == pts[k]);
  EXPECT_THROW(parse_point_cloud_csv("x,y,z\n1,2\n"), DocumentError);
  EXPECT_THROW(parse_point_cloud_csv("x,y,z\n1,2,abc\n"), DocumentError);
  EXPECT_EQ(parse_point_cloud_csv("1,2,3\r\n4,5,6\n").size(), 2u);
}

TEST(CsvTest, SweepHeader) {
  const std::string csv = sweep_csv({});
  EXPECT_EQ(csv, "s,start_id,outcome,iterations,payoff_player1_re,payoff_player1_im,ground_overlap_magnitude\n");
}

TEST(CsvTest, ShortestRoundTripReals) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0}) EXPECT_EQ(std::stod(format_real(x)), x);
  EXPECT_EQ(format_real(0.5), "0.5");
}

TEST(FileTest, AtomicWriteReplacesContent) {
  const fs::path dir = fs::temp_directory_path() / "qnash_io_test";
  fs::remove_all(dir);
  const fs::path target = dir / "nested" / "out.txt";
  write_file_atomic(target, "first");
  write_file_atomic(target, "second");
  EXPECT_EQ(read_file(target), "second");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(target.parent_path())) ++files;
  EXPECT_EQ(files, 1u);
  fs::remove_all(dir);
}
