#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "steerkit/io.hpp"
#include "steerkit/protocol.hpp"
#include "steerkit/rng.hpp"
#include "steerkit/search.hpp"
#include "steerkit/state.hpp"

using namespace steerkit;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::FILE* file = std::fopen(path.c_str(), "wb");
  REQUIRE(file != nullptr);
  std::fwrite(text.data(), 1, text.size(), file);
  std::fclose(file);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("state files round trip bit-exactly") {
  Rng rng(404);
  Vec v(8);
  for (int idx = 0; idx < 8; ++idx) {
    v(idx) = cplx(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
  }
  v.normalize();
  StateVector state(v);

  std::string path = temp_path("steerkit_state_roundtrip.json");
  save_state_file(path, state, "random test state");
  auto [loaded, label] = load_state_file(path);
  CHECK(label == "random test state");
  REQUIRE(loaded.dim() == 8);
  for (int idx = 0; idx < 8; ++idx) {
    // Bitwise equality, not approximate.
    CHECK(loaded.amplitudes()(idx).real() == v(idx).real());
    CHECK(loaded.amplitudes()(idx).imag() == v(idx).imag());
  }
  std::filesystem::remove(path);
}

TEST_CASE("malformed state files are rejected") {
  std::string path = temp_path("steerkit_state_bad.json");

  write_text(path, "not json at all");
  CHECK_THROWS_AS(load_state_file(path), ValidationError);

  write_text(path, R"({"amplitudes": [[1.0, 0.0], [0.0, 0.0]]})");
  CHECK_THROWS_AS(load_state_file(path), ValidationError);

  write_text(path, R"({"dim": 2, "amplitudes": [[1.0, 0.0]]})");
  CHECK_THROWS_AS(load_state_file(path), ValidationError);

  write_text(path, R"({"dim": 2, "amplitudes": [[1.0, 0.0], [1.0, 0.0]]})");
  CHECK_THROWS_AS(load_state_file(path), ValidationError);

  write_text(path, R"({"dim": 3,
      "amplitudes": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]})");
  CHECK_THROWS_AS(load_state_file(path), ValidationError);

  CHECK_THROWS_AS(load_state_file(temp_path("steerkit_state_missing.json")),
                  ValidationError);
  std::filesystem::remove(path);
}

TEST_CASE("hex and bit conversions") {
  std::vector<int> bits = bits_from_hex("a3");
  CHECK(bits == std::vector<int>{1, 0, 1, 0, 0, 0, 1, 1});
  CHECK(hex_from_bits(bits) == "a3");

  CHECK(bits_from_hex("F") == std::vector<int>{1, 1, 1, 1});
  CHECK(bits_from_hex("0") == std::vector<int>{0, 0, 0, 0});
  CHECK(hex_from_bits({1, 1, 1, 1}) == "f");

  // 128-bit round trip.
  std::string wide = "0123456789abcdef0123456789abcdef";
  CHECK(hex_from_bits(bits_from_hex(wide)) == wide);

  CHECK(hex_from_bits({}).empty());
  CHECK_THROWS_AS(bits_from_hex(""), ValidationError);
  CHECK_THROWS_AS(bits_from_hex("xyz"), ValidationError);
}

TEST_CASE("frame json uses six decimal places") {
  Json frame = frame_json(FrameAngle{kPi / 2.0, 0.1234567891});
  CHECK(frame["theta"].get<double>() == doctest::Approx(1.570796).epsilon(1e-9));
  CHECK(frame["phi"].get<double>() == doctest::Approx(0.123457).epsilon(1e-9));
  std::string text = frame.dump();
  CHECK(text.find("1.570796") != std::string::npos);
  CHECK(text.find("0.123457") != std::string::npos);
}

TEST_CASE("csv export format") {
  ScanCurve curve;
  curve.policy = FramePolicy::Fixed;
  curve.fixed_frame = FrameAngle{kPi / 2.0, 0.0};
  curve.samples.push_back({0.0, 2.0, std::sqrt(6.0)});
  curve.samples.push_back({0.5, 2.8660254037844386, std::sqrt(6.0)});

  std::string csv = scan_curve_csv(curve);
  CHECK(csv.rfind("alpha,lhs,bound\n", 0) == 0);
  // nine significant digits, %g style
  CHECK(csv.find("2.8660254") != std::string::npos);
  CHECK(csv.find("2.44948974") != std::string::npos);
  // header plus one line per sample
  int newlines = 0;
  for (char ch : csv) newlines += ch == '\n' ? 1 : 0;
  CHECK(newlines == 3);
  CHECK(scan_curve_csv(curve) == csv);
}

TEST_CASE("violation report json carries the full verdict") {
  ViolationReport report = evaluate_inequality(
      ghz_state(), inequality_by_id(InequalityId::S1Diag),
      FrameAngle{kPi / 2.0, 0.0}, FrameAngle{kPi / 2.0, 0.0});
  Json doc = violation_report_json(report);
  CHECK(doc["inequality"] == "s1-diag");
  CHECK(doc["lhs"].get<double>() == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(doc["violated"].get<bool>());
  CHECK(doc.contains("frame_bob"));
  CHECK(doc.contains("frame_charlie"));
}

TEST_CASE("transcript export is line-delimited json") {
  QkaConfig config;
  config.rounds = 40;
  config.mode = ProtocolMode::Sampled;
  config.seed = 11;
  QkaResult result = run_qka(config);

  std::string lines = transcript_lines(result.transcript);
  int count = 0;
  std::size_t start = 0;
  while (start < lines.size()) {
    std::size_t end = lines.find('\n', start);
    REQUIRE(end != std::string::npos);
    Json record = Json::parse(lines.substr(start, end - start));
    CHECK(record["index"].get<int>() == count);
    CHECK(record.contains("axis"));
    CHECK(record.contains("b"));
    CHECK(record.contains("c"));
    CHECK(record.contains("alice_axis"));
    CHECK(record.contains("a"));
    CHECK_FALSE(record["alice_axis"].is_null());
    start = end + 1;
    ++count;
  }
  CHECK(count == 40);

  // Exact-mode rounds have no tomography fields.
  config.mode = ProtocolMode::Exact;
  QkaResult exact = run_qka(config);
  std::string first_line =
      transcript_lines(exact.transcript).substr(0, transcript_lines(exact.transcript).find('\n'));
  Json record = Json::parse(first_line);
  CHECK(record["alice_axis"].is_null());
  CHECK(record["a"].is_null());
}

TEST_CASE("documents refuse non-finite values") {
  Json fine = {{"value", 1.25}, {"nested", {{"list", {1.0, 2.0}}}}};
  CHECK_NOTHROW(require_finite(fine));
  std::string rendered = dump_document(fine);
  CHECK(rendered.back() == '\n');

  Json bad = {{"value", std::nan("")}};
  CHECK_THROWS_AS(require_finite(bad), ValidationError);
  Json inf = {{"list", {1.0, std::numeric_limits<double>::infinity()}}};
  CHECK_THROWS_AS(require_finite(inf), ValidationError);
}

TEST_CASE("result documents are byte-stable") {
  QkaConfig config;
  config.rounds = 120;
  config.mode = ProtocolMode::Sampled;
  config.seed = 55;
  std::string first = dump_document(qka_result_json(run_qka(config)));
  std::string second = dump_document(qka_result_json(run_qka(config)));
  CHECK(first == second);

  QkaResult result = run_qka(config);
  Json doc = qka_result_json(result);
  CHECK(doc["rounds"].get<int>() == 120);
  CHECK(doc.contains("lhs_estimate"));
  CHECK(doc.contains("key_roles"));
  CHECK(doc["key_roles"].contains("escrow"));
  CHECK(doc["key_roles"].contains("collective"));
  CHECK(doc.contains("key_rate"));
  CHECK(doc["key_rate"]["r_min"].get<double>() == 1.0);
}

TEST_CASE("comparison document: verdicts are withheld on a failed check") {
  QpcConfig config;
  config.secret_b = {1, 0, 1};
  config.secret_c = {1, 1, 1};
  config.total = 40;
  config.seed = 3;

  QpcResult open = run_qpc(config);
  Json doc = qpc_result_json(open);
  CHECK_FALSE(doc["withheld"].get<bool>());
  CHECK(doc["verdicts"].is_array());
  CHECK(doc["verdicts"].size() == 3);
  CHECK_FALSE(doc["overall_equal"].get<bool>());

  config.bob = PartyBehavior::parse("basis-liar:x=x,y=x,z=x");
  QpcResult withheld = run_qpc(config);
  Json closed = qpc_result_json(withheld);
  CHECK(closed["withheld"].get<bool>());
  CHECK(closed["verdicts"].is_null());
  CHECK(closed["overall_equal"].is_null());
}

}  // TEST_SUITE
