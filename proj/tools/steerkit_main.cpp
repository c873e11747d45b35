// Command-line front end: one subcommand per library operation, JSON or CSV
// output with the effective configuration echoed for reproducibility.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "steerkit/io.hpp"
#include "steerkit/protocol.hpp"
#include "steerkit/search.hpp"
#include "steerkit/state.hpp"
#include "steerkit/steering.hpp"

namespace {

using steerkit::Json;

struct StateOptions {
  std::string name = "ghz";
  std::string file;
  double alpha = 0.0;
  bool alpha_set = false;
};

void add_state_options(CLI::App* cmd, StateOptions* opts) {
  cmd->add_option("--state", opts->name,
                  "Named state: ghz, w, bell-ab-times-0, bell-ac-times-1, "
                  "plus-one-plus, generalized-ghz")
      ->capture_default_str();
  cmd->add_option("--state-file", opts->file, "Path to a JSON state file");
  cmd->add_option("--alpha", opts->alpha,
                  "Weight of |000> for the generalized GHZ family")
      ->each([opts](const std::string&) { opts->alpha_set = true; });
}

steerkit::StateVector resolve_state(const StateOptions& opts,
                                    std::string* label) {
  if (!opts.file.empty()) {
    auto [state, file_label] = steerkit::load_state_file(opts.file);
    *label = file_label;
    return state;
  }
  if (opts.name == "generalized-ghz" || opts.alpha_set) {
    if (!opts.alpha_set) {
      throw steerkit::ValidationError("generalized-ghz requires --alpha");
    }
    char buf[48];
    std::snprintf(buf, sizeof(buf), "generalized-ghz(alpha=%.9g)", opts.alpha);
    *label = buf;
    return steerkit::generalized_ghz(opts.alpha);
  }
  *label = opts.name;
  return steerkit::named_state(opts.name);
}

struct SeedOptions {
  std::uint64_t value = 0;
  bool from_flag = false;
};

void add_seed_option(CLI::App* cmd, SeedOptions* seed) {
  cmd->add_option("--seed", seed->value,
                  "Random seed (defaults to STEERKIT_SEED or 0)")
      ->each([seed](const std::string&) { seed->from_flag = true; });
}

std::string resolve_seed(SeedOptions* seed) {
  if (seed->from_flag) return "flag";
  if (const char* env = std::getenv("STEERKIT_SEED")) {
    char* end = nullptr;
    unsigned long long parsed = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
      throw steerkit::ValidationError("STEERKIT_SEED must be an integer");
    }
    seed->value = parsed;
    return "env";
  }
  seed->value = 0;
  return "default";
}

struct SearchOptions {
  steerkit::SearchConfig config;
};

void add_search_options(CLI::App* cmd, SearchOptions* opts) {
  cmd->add_option("--grid", opts->config.grid_n,
                  "Tied-frame grid resolution per angle")
      ->capture_default_str();
  cmd->add_option("--grid-independent", opts->config.grid_n_independent,
                  "Per-angle resolution of the independent-frame grid")
      ->capture_default_str();
  cmd->add_option("--refine-iters", opts->config.refine_iters,
                  "Simplex refinement iterations")
      ->capture_default_str();
  cmd->add_flag("--independent-frames", opts->config.independent_frames,
                "Let Bob's and Charlie's frames vary independently");
}

Json search_config_json(const steerkit::SearchConfig& config) {
  return Json{{"grid", config.grid_n},
              {"grid_independent", config.grid_n_independent},
              {"refine_iters", config.refine_iters},
              {"tol", config.tol},
              {"independent_frames", config.independent_frames}};
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) {
    throw steerkit::ValidationError("cannot open output path: " + path);
  }
  out << text;
}

steerkit::PartyBehavior parse_behavior(const std::string& text) {
  return steerkit::PartyBehavior::parse(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steerkit: tripartite steering inequalities and protocols"};
  app.require_subcommand(1);
  int exit_code = 0;

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "Evaluate one inequality at a fixed tied frame");
  StateOptions eval_state;
  add_state_options(evaluate, &eval_state);
  std::string eval_inequality;
  double eval_theta = 0.0;
  double eval_phi = 0.0;
  std::string eval_output;
  evaluate->add_option("--inequality", eval_inequality, "Inequality id")
      ->required();
  evaluate->add_option("--theta", eval_theta, "Frame polar angle (radians)")
      ->capture_default_str();
  evaluate->add_option("--phi", eval_phi, "Frame azimuth (radians)")
      ->capture_default_str();
  evaluate->add_option("--output", eval_output, "Write the document here");
  evaluate->callback([&] {
    std::string label;
    steerkit::StateVector psi = resolve_state(eval_state, &label);
    const steerkit::InequalitySpec& spec = steerkit::inequality_by_id(
        steerkit::inequality_id_from_name(eval_inequality));
    steerkit::FrameAngle frame{eval_theta, eval_phi};
    frame.validate();
    steerkit::ViolationReport report =
        steerkit::evaluate_inequality(psi, spec, frame, frame);
    Json doc{{"command", "evaluate"},
             {"config", Json{{"state", label},
                             {"inequality", eval_inequality},
                             {"frame", steerkit::frame_json(frame)}}},
             {"report", steerkit::violation_report_json(report)}};
    emit(steerkit::dump_document(doc), eval_output);
  });

  // scan-alpha
  auto* scan = app.add_subcommand(
      "scan-alpha", "Sweep the generalized GHZ family with the diagonal sum");
  int scan_steps = 201;
  bool scan_optimize = false;
  double scan_theta = steerkit::kPi / 2.0;
  double scan_phi = 0.0;
  std::string scan_format = "csv";
  std::string scan_output;
  SearchOptions scan_search;
  scan->add_option("--steps", scan_steps, "Number of alpha samples")
      ->capture_default_str();
  scan->add_flag("--optimize-frame", scan_optimize,
                 "Re-optimize the frame at every sample");
  scan->add_option("--theta", scan_theta, "Fixed-frame polar angle")
      ->capture_default_str();
  scan->add_option("--phi", scan_phi, "Fixed-frame azimuth")
      ->capture_default_str();
  add_search_options(scan, &scan_search);
  scan->add_option("--format", scan_format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  scan->add_option("--output", scan_output, "Write the curve here");
  scan->callback([&] {
    steerkit::FramePolicy policy = scan_optimize
                                       ? steerkit::FramePolicy::Optimized
                                       : steerkit::FramePolicy::Fixed;
    steerkit::FrameAngle fixed{scan_theta, scan_phi};
    steerkit::ScanCurve curve =
        steerkit::alpha_scan(scan_steps, policy, fixed, scan_search.config);
    if (scan_format == "csv") {
      emit(steerkit::scan_curve_csv(curve), scan_output);
    } else {
      Json doc{{"command", "scan-alpha"},
               {"config", Json{{"steps", scan_steps},
                               {"policy", scan_optimize ? "optimized" : "fixed"},
                               {"fixed_frame", steerkit::frame_json(fixed)},
                               {"search", search_config_json(scan_search.config)}}},
               {"curve", steerkit::scan_curve_json(curve)}};
      emit(steerkit::dump_document(doc), scan_output);
    }
  });

  // classify
  auto* classify = app.add_subcommand(
      "classify", "Optimize the full catalog and attribute the violations");
  StateOptions classify_state;
  add_state_options(classify, &classify_state);
  SearchOptions classify_search;
  add_search_options(classify, &classify_search);
  std::string classify_output;
  classify->add_option("--output", classify_output, "Write the document here");
  classify->callback([&] {
    std::string label;
    steerkit::StateVector psi = resolve_state(classify_state, &label);
    steerkit::ClassificationResult result =
        steerkit::classify_collective(psi, classify_search.config);
    Json doc{{"command", "classify"},
             {"config", Json{{"state", label},
                             {"search", search_config_json(classify_search.config)}}},
             {"result", steerkit::classification_json(result)}};
    emit(steerkit::dump_document(doc), classify_output);
  });

  // maximize
  auto* maximize = app.add_subcommand(
      "maximize", "Maximize one inequality over measurement frames");
  StateOptions maximize_state;
  add_state_options(maximize, &maximize_state);
  std::string maximize_inequality;
  SearchOptions maximize_search;
  add_search_options(maximize, &maximize_search);
  std::string maximize_output;
  maximize->add_option("--inequality", maximize_inequality, "Inequality id")
      ->required();
  maximize->add_option("--output", maximize_output, "Write the document here");
  maximize->callback([&] {
    std::string label;
    steerkit::StateVector psi = resolve_state(maximize_state, &label);
    const steerkit::InequalitySpec& spec = steerkit::inequality_by_id(
        steerkit::inequality_id_from_name(maximize_inequality));
    steerkit::MaximizeResult result =
        steerkit::maximize_violation(psi, spec, maximize_search.config);
    Json doc{{"command", "maximize"},
             {"config", Json{{"state", label},
                             {"inequality", maximize_inequality},
                             {"search", search_config_json(maximize_search.config)}}},
             {"result", steerkit::maximize_result_json(result)}};
    emit(steerkit::dump_document(doc), maximize_output);
  });

  // appendix-b
  auto* appendix = app.add_subcommand(
      "appendix-b", "Audit the catalog at the six reference state/frame pairs");
  SearchOptions appendix_search;
  add_search_options(appendix, &appendix_search);
  std::string appendix_output;
  appendix->add_option("--output", appendix_output, "Write the document here");
  appendix->callback([&] {
    std::vector<steerkit::ReferencePairResult> results =
        steerkit::appendix_b_check(appendix_search.config);
    Json doc{{"command", "appendix-b"},
             {"config", Json{{"search", search_config_json(appendix_search.config)}}},
             {"result", steerkit::reference_pairs_json(results)}};
    emit(steerkit::dump_document(doc), appendix_output);
  });

  // lhs-check
  auto* lhs_check = app.add_subcommand(
      "lhs-check", "Random hidden-state models must respect every bound");
  int lhs_trials = 1000;
  SeedOptions lhs_seed;
  std::string lhs_output;
  lhs_check->add_option("--trials", lhs_trials, "Number of random models")
      ->capture_default_str();
  add_seed_option(lhs_check, &lhs_seed);
  lhs_check->add_option("--output", lhs_output, "Write the document here");
  lhs_check->callback([&] {
    if (lhs_trials < 1) {
      throw steerkit::ValidationError("trials must be positive");
    }
    std::string seed_source = resolve_seed(&lhs_seed);
    steerkit::Rng rng = steerkit::substream(lhs_seed.value, "lhs-check");
    int violations = 0;
    double max_ratio = 0.0;
    for (int trial = 0; trial < lhs_trials; ++trial) {
      steerkit::LHSEnsemble model = steerkit::random_lhs_ensemble(rng);
      for (const steerkit::InequalitySpec& spec :
           steerkit::inequality_catalog()) {
        steerkit::ViolationReport report =
            steerkit::evaluate_inequality(model, spec);
        if (report.violated) ++violations;
        max_ratio = std::max(max_ratio, report.lhs / report.bound);
      }
    }
    Json doc{{"command", "lhs-check"},
             {"config", Json{{"trials", lhs_trials},
                             {"seed", lhs_seed.value},
                             {"seed_source", seed_source}}},
             {"result", Json{{"violations", violations},
                             {"max_ratio", max_ratio}}}};
    emit(steerkit::dump_document(doc), lhs_output);
  });

  // qka
  auto* qka = app.add_subcommand(
      "qka", "Run the key-authentication protocol");
  StateOptions qka_state;
  add_state_options(qka, &qka_state);
  int qka_rounds = 1000;
  std::string qka_mode = "exact";
  SeedOptions qka_seed;
  double qka_threshold = 2.9;
  std::string qka_bob = "honest";
  std::string qka_charlie = "honest";
  std::string qka_transcript;
  std::string qka_output;
  qka->add_option("--rounds", qka_rounds, "Protocol rounds")
      ->capture_default_str();
  qka->add_option("--mode", qka_mode, "exact or sampled")
      ->check(CLI::IsMember({"exact", "sampled"}))
      ->capture_default_str();
  add_seed_option(qka, &qka_seed);
  qka->add_option("--threshold", qka_threshold, "Authentication threshold")
      ->capture_default_str();
  qka->add_option("--bob", qka_bob, "Bob's behavior")->capture_default_str();
  qka->add_option("--charlie", qka_charlie, "Charlie's behavior")
      ->capture_default_str();
  qka->add_option("--transcript", qka_transcript,
                  "Write one JSON record per round to this path");
  qka->add_option("--output", qka_output, "Write the document here");
  qka->callback([&] {
    std::string label;
    steerkit::QkaConfig config;
    config.state = resolve_state(qka_state, &label);
    config.rounds = qka_rounds;
    config.mode = steerkit::protocol_mode_from_name(qka_mode);
    std::string seed_source = resolve_seed(&qka_seed);
    config.seed = qka_seed.value;
    config.threshold = qka_threshold;
    config.bob = parse_behavior(qka_bob);
    config.charlie = parse_behavior(qka_charlie);
    steerkit::QkaResult result = steerkit::run_qka(config);
    if (!qka_transcript.empty()) {
      emit(steerkit::transcript_lines(result.transcript), qka_transcript);
    }
    Json doc{{"command", "qka"},
             {"config",
              Json{{"state", label},
                   {"rounds", config.rounds},
                   {"mode", qka_mode},
                   {"seed", config.seed},
                   {"seed_source", seed_source},
                   {"threshold", config.threshold},
                   {"protocol_frame", steerkit::frame_json(config.protocol_frame)},
                   {"bob", config.bob.describe()},
                   {"charlie", config.charlie.describe()}}},
             {"result", steerkit::qka_result_json(result)}};
    emit(steerkit::dump_document(doc), qka_output);
    if (!result.authenticated) exit_code = 3;
  });

  // qpc
  auto* qpc = app.add_subcommand(
      "qpc", "Run the private-comparison protocol with its embedded check");
  std::string qpc_secret_b;
  std::string qpc_secret_c;
  int qpc_total = 0;
  int qpc_check = 0;
  int qpc_bias = 3;
  std::string qpc_mode = "exact";
  SeedOptions qpc_seed;
  double qpc_threshold = 2.9;
  std::string qpc_bob = "honest";
  std::string qpc_charlie = "honest";
  std::string qpc_output;
  qpc->add_option("--secret-b", qpc_secret_b, "Bob's secret (hex)")->required();
  qpc->add_option("--secret-c", qpc_secret_c, "Charlie's secret (hex)")
      ->required();
  qpc->add_option("--total", qpc_total, "Total GHZ copies")->required();
  qpc->add_option("--check", qpc_check,
                  "Check rounds (0 derives the count from the bias)")
      ->capture_default_str();
  qpc->add_option("--bias", qpc_bias, "Basis designation odds toward x")
      ->capture_default_str();
  qpc->add_option("--mode", qpc_mode, "exact or sampled")
      ->check(CLI::IsMember({"exact", "sampled"}))
      ->capture_default_str();
  add_seed_option(qpc, &qpc_seed);
  qpc->add_option("--threshold", qpc_threshold,
                  "Three-axis authentication threshold")
      ->capture_default_str();
  qpc->add_option("--bob", qpc_bob, "Bob's behavior during check rounds")
      ->capture_default_str();
  qpc->add_option("--charlie", qpc_charlie,
                  "Charlie's behavior during check rounds")
      ->capture_default_str();
  qpc->add_option("--output", qpc_output, "Write the document here");
  qpc->callback([&] {
    steerkit::QpcConfig config;
    config.secret_b = steerkit::bits_from_hex(qpc_secret_b);
    config.secret_c = steerkit::bits_from_hex(qpc_secret_c);
    config.total = qpc_total;
    config.check = qpc_check;
    config.bias = qpc_bias;
    config.mode = steerkit::protocol_mode_from_name(qpc_mode);
    std::string seed_source = resolve_seed(&qpc_seed);
    config.seed = qpc_seed.value;
    config.threshold = qpc_threshold;
    config.bob = parse_behavior(qpc_bob);
    config.charlie = parse_behavior(qpc_charlie);
    steerkit::QpcResult result = steerkit::run_qpc(config);
    Json doc{{"command", "qpc"},
             {"config", Json{{"secret_bits",
                              static_cast<int>(config.secret_b.size())},
                             {"total", config.total},
                             {"check", config.check},
                             {"bias", config.bias},
                             {"mode", qpc_mode},
                             {"seed", config.seed},
                             {"seed_source", seed_source},
                             {"threshold", config.threshold},
                             {"bob", config.bob.describe()},
                             {"charlie", config.charlie.describe()}}},
             {"result", steerkit::qpc_result_json(result)}};
    emit(steerkit::dump_document(doc), qpc_output);
    if (result.withheld) exit_code = 3;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::CallForAllHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 1;
  } catch (const steerkit::ValidationError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return exit_code;
}
