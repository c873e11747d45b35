#pragma once

// Serialization: structured JSON documents for every result type, the CSV
// scan export, and the state-file format. All writers produce deterministic
// byte-identical output for identical inputs and never emit NaN or Inf.

#include <string>
#include <utility>

#include <json.hpp>

#include "steerkit/protocol.hpp"
#include "steerkit/search.hpp"
#include "steerkit/state.hpp"
#include "steerkit/steering.hpp"

namespace steerkit {

using Json = nlohmann::ordered_json;

// Angles are reported in radians at six decimal places.
Json frame_json(const FrameAngle& frame);

Json violation_report_json(const ViolationReport& report);
Json ensemble_json(const ConditionalEnsemble& ensemble);
Json maximize_result_json(const MaximizeResult& result);
Json classification_json(const ClassificationResult& result);
Json reference_pairs_json(const std::vector<ReferencePairResult>& results);
Json key_rate_json(const KeyRateReport& report);
Json qka_result_json(const QkaResult& result);
Json qpc_result_json(const QpcResult& result);

Json scan_curve_json(const ScanCurve& curve);
// Header "alpha,lhs,bound", one row per sample, nine significant digits.
std::string scan_curve_csv(const ScanCurve& curve);

// One line-delimited record per round.
std::string transcript_lines(const std::vector<QkaRound>& transcript);

// Throws if any numeric value in the document is not finite.
void require_finite(const Json& value);

// Renders with a trailing newline after checking finiteness.
std::string dump_document(const Json& value);

// State files: {"dim": n, "amplitudes": [[re, im], ...], "label": "..."}.
// Amplitudes survive a save/load round trip bit-exactly.
std::pair<StateVector, std::string> load_state_file(const std::string& path);
void save_state_file(const std::string& path, const StateVector& state,
                     const std::string& label);

// Hex string (most significant digit first) to bits, four per digit.
std::vector<int> bits_from_hex(const std::string& hex);
std::string hex_from_bits(const std::vector<int>& bits);

}  // namespace steerkit
