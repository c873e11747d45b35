#include "steerkit/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace steerkit {

namespace {

double six_decimals(double value) { return std::round(value * 1e6) / 1e6; }

std::string sig9(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

Json complex_json(const cplx& z) { return Json::array({z.real(), z.imag()}); }

}  // namespace

Json frame_json(const FrameAngle& frame) {
  return Json{{"theta", six_decimals(frame.theta)},
              {"phi", six_decimals(frame.phi)}};
}

Json violation_report_json(const ViolationReport& report) {
  return Json{{"inequality", inequality_id_name(report.inequality)},
              {"lhs", report.lhs},
              {"bound", report.bound},
              {"violated", report.violated},
              {"frame_bob", frame_json(report.frame_bob)},
              {"frame_charlie", frame_json(report.frame_charlie)}};
}

Json ensemble_json(const ConditionalEnsemble& ensemble) {
  Json branches = Json::array();
  for (const EnsembleBranch& branch : ensemble.branches) {
    Json entry{{"b", branch.b},
               {"c", branch.c},
               {"probability", branch.probability},
               {"defined", branch.defined}};
    if (branch.defined) {
      entry["state"] = Json::array(
          {Json::array({complex_json(branch.state(0, 0)),
                        complex_json(branch.state(0, 1))}),
           Json::array({complex_json(branch.state(1, 0)),
                        complex_json(branch.state(1, 1))})});
    }
    branches.push_back(std::move(entry));
  }
  return Json{{"conditioning", ensemble.conditioning}, {"branches", branches}};
}

Json maximize_result_json(const MaximizeResult& result) {
  return Json{{"inequality", inequality_id_name(result.report.inequality)},
              {"lhs", result.lhs},
              {"bound", result.report.bound},
              {"violated", result.report.violated},
              {"frame_bob", frame_json(result.frame_bob)},
              {"frame_charlie", frame_json(result.frame_charlie)}};
}

Json classification_json(const ClassificationResult& result) {
  Json per = Json::array();
  for (const MaximizeResult& entry : result.per_inequality) {
    per.push_back(maximize_result_json(entry));
  }
  return Json{{"label", steering_label_name(result.label)},
              {"concurrence_ab", result.concurrence_ab},
              {"concurrence_ac", result.concurrence_ac},
              {"per_inequality", per}};
}

Json reference_pairs_json(const std::vector<ReferencePairResult>& results) {
  Json pairs = Json::array();
  for (const ReferencePairResult& pair : results) {
    Json entries = Json::array();
    for (const ReferencePairEntry& entry : pair.entries) {
      entries.push_back(
          Json{{"inequality", inequality_id_name(entry.id)},
               {"lhs", entry.lhs},
               {"bound", entry.bound},
               {"violated", entry.violated},
               {"state_max", entry.state_max},
               {"attains_state_max", entry.attains_state_max},
               {"attains_theoretical_max", entry.attains_theoretical_max}});
    }
    pairs.push_back(Json{{"state", pair.state_label},
                         {"frame", frame_json(pair.frame)},
                         {"entries", entries}});
  }
  return Json{{"pairs", pairs}};
}

Json key_rate_json(const KeyRateReport& report) {
  return Json{{"basis_collective", axis_name(report.basis_k)},
              {"basis_escrow", axis_name(report.basis_kp)},
              {"entropy_collective_given_pair", report.entropy_k},
              {"entropy_escrow_given_pair", report.entropy_kp},
              {"v", report.v},
              {"uncertainty_floor", report.uncertainty_floor},
              {"r_min", report.r_min},
              {"identical_bases", report.identical_bases},
              {"note", report.note}};
}

Json qka_result_json(const QkaResult& result) {
  return Json{{"rounds", static_cast<int>(result.transcript.size())},
              {"lhs_estimate", result.lhs_estimate},
              {"stderr", result.std_error},
              {"threshold", result.threshold},
              {"authenticated", result.authenticated},
              {"key_roles",
               Json{{"escrow",
                     Json{{"bits", hex_from_bits(result.escrow_key)},
                          {"length", static_cast<int>(result.escrow_key.size())},
                          {"mismatches", result.escrow_mismatches}}},
                    {"collective",
                     Json{{"bits", hex_from_bits(result.collective_key)},
                          {"length",
                           static_cast<int>(result.collective_key.size())}}}}},
              {"key_rate", key_rate_json(result.key_rate)},
              {"warnings", result.warnings}};
}

Json qpc_result_json(const QpcResult& result) {
  Json check{{"lhs_estimate", result.check.lhs_estimate},
             {"stderr", result.check.std_error},
             {"threshold_effective", result.check.threshold_effective},
             {"authenticated", result.check.authenticated},
             {"rounds", result.check.rounds}};
  Json doc{{"total", result.total},
           {"checked", result.checked},
           {"check", check},
           {"withheld", result.withheld}};
  if (result.withheld) {
    doc["verdicts"] = nullptr;
    doc["overall_equal"] = nullptr;
  } else {
    doc["verdicts"] = result.position_verdicts;
    doc["overall_equal"] = result.overall_equal;
  }
  return doc;
}

Json scan_curve_json(const ScanCurve& curve) {
  Json samples = Json::array();
  for (const ScanSample& sample : curve.samples) {
    samples.push_back(Json{{"alpha", sample.alpha},
                           {"lhs", sample.lhs},
                           {"bound", sample.bound}});
  }
  Json doc{{"policy", curve.policy == FramePolicy::Fixed ? "fixed" : "optimized"},
           {"samples", samples}};
  if (curve.policy == FramePolicy::Fixed) {
    doc["fixed_frame"] = frame_json(curve.fixed_frame);
  }
  return doc;
}

std::string scan_curve_csv(const ScanCurve& curve) {
  std::string out = "alpha,lhs,bound\n";
  for (const ScanSample& sample : curve.samples) {
    out += sig9(sample.alpha);
    out += ',';
    out += sig9(sample.lhs);
    out += ',';
    out += sig9(sample.bound);
    out += '\n';
  }
  return out;
}

std::string transcript_lines(const std::vector<QkaRound>& transcript) {
  std::string out;
  for (const QkaRound& round : transcript) {
    Json record{{"index", round.index},
                {"axis", axis_name(round.axis)},
                {"b", round.b},
                {"c", round.c},
                {"alice_axis", round.alice_axis >= 0
                                   ? Json(axis_name(static_cast<Axis>(
                                         round.alice_axis)))
                                   : Json(nullptr)},
                {"a", round.alice_outcome >= 0 ? Json(round.alice_outcome)
                                               : Json(nullptr)},
                {"claimed_axes", Json::array({axis_name(round.axis),
                                              axis_name(round.axis)})}};
    out += record.dump();
    out += '\n';
  }
  return out;
}

void require_finite(const Json& value) {
  if (value.is_number_float() && !std::isfinite(value.get<double>())) {
    throw ValidationError("refusing to serialize a non-finite number");
  }
  if (value.is_array() || value.is_object()) {
    for (const auto& item : value) require_finite(item);
  }
}

std::string dump_document(const Json& value) {
  require_finite(value);
  return value.dump(2) + "\n";
}

std::pair<StateVector, std::string> load_state_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open state file: " + path);
  }
  Json doc;
  try {
    in >> doc;
  } catch (const Json::parse_error& err) {
    throw ValidationError(std::string("state file is not valid JSON: ") +
                          err.what());
  }
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("amplitudes")) {
    throw ValidationError("state file needs dim and amplitudes fields");
  }
  int dim = 0;
  try {
    dim = doc.at("dim").get<int>();
  } catch (const Json::exception&) {
    throw ValidationError("state file dim must be an integer");
  }
  const Json& amps = doc.at("amplitudes");
  if (!amps.is_array() || static_cast<int>(amps.size()) != dim) {
    throw ValidationError("amplitude count must match dim");
  }
  Vec amplitudes(dim);
  for (int i = 0; i < dim; ++i) {
    const Json& entry = amps.at(i);
    if (!entry.is_array() || entry.size() != 2 ||
        !entry.at(0).is_number() || !entry.at(1).is_number()) {
      throw ValidationError("amplitudes are [re, im] pairs");
    }
    amplitudes(i) = cplx(entry.at(0).get<double>(), entry.at(1).get<double>());
  }
  std::string label = doc.value("label", std::string("unnamed"));
  return {StateVector(amplitudes), label};
}

void save_state_file(const std::string& path, const StateVector& state,
                     const std::string& label) {
  Json amps = Json::array();
  for (int i = 0; i < state.dim(); ++i) {
    amps.push_back(complex_json(state[i]));
  }
  Json doc{{"dim", state.dim()}, {"amplitudes", amps}, {"label", label}};
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write state file: " + path);
  }
  out << dump_document(doc);
}

std::vector<int> bits_from_hex(const std::string& hex) {
  if (hex.empty()) {
    throw ValidationError("hex secret must be nonempty");
  }
  std::vector<int> bits;
  bits.reserve(hex.size() * 4);
  for (char c : hex) {
    int value = 0;
    if (c >= '0' && c <= '9') {
      value = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      value = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      value = c - 'A' + 10;
    } else {
      throw ValidationError("secrets must be hexadecimal");
    }
    for (int bit = 3; bit >= 0; --bit) bits.push_back((value >> bit) & 1);
  }
  return bits;
}

std::string hex_from_bits(const std::vector<int>& bits) {
  std::string out;
  int value = 0;
  int have = 0;
  for (int bit : bits) {
    value = (value << 1) | (bit & 1);
    if (++have == 4) {
      out += "0123456789abcdef"[value];
      value = 0;
      have = 0;
    }
  }
  if (have > 0) {
    value <<= (4 - have);
    out += "0123456789abcdef"[value];
  }
  return out;
}

}  // namespace steerkit
