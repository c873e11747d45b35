#include "steerkit/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace steerkit {

ProtocolMode protocol_mode_from_name(const std::string& name) {
  if (name == "exact") return ProtocolMode::Exact;
  if (name == "sampled") return ProtocolMode::Sampled;
  throw ValidationError("unknown mode: " + name);
}

std::string protocol_mode_name(ProtocolMode mode) {
  return mode == ProtocolMode::Exact ? "exact" : "sampled";
}

PartyBehavior PartyBehavior::parse(const std::string& text) {
  PartyBehavior out;
  if (text == "honest") {
    return out;
  }
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "basis-liar") {
    out.kind = Kind::BasisLiar;
    bool seen[3] = {false, false, false};
    std::stringstream ss(tail);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw ValidationError("basis-liar entries look like x=z");
      }
      Axis from = axis_from_name(item.substr(0, eq));
      Axis to = axis_from_name(item.substr(eq + 1));
      out.liar_map[static_cast<int>(from)] = to;
      seen[static_cast<int>(from)] = true;
    }
    if (!seen[0] || !seen[1] || !seen[2]) {
      throw ValidationError("basis-liar map must cover x, y and z");
    }
    return out;
  }
  if (head == "fixed") {
    out.kind = Kind::FixedOutcome;
    if (tail == "0") {
      out.fixed_bit = 0;
    } else if (tail == "1") {
      out.fixed_bit = 1;
    } else {
      throw ValidationError("fixed outcome must be 0 or 1");
    }
    return out;
  }
  if (head == "misaligned") {
    out.kind = Kind::Misaligned;
    std::stringstream ss(tail);
    char comma = 0;
    if (!(ss >> out.delta_theta >> comma >> out.delta_phi) || comma != ',') {
      throw ValidationError("misaligned takes dtheta,dphi");
    }
    if (!std::isfinite(out.delta_theta) || !std::isfinite(out.delta_phi)) {
      throw ValidationError("frame offsets must be finite");
    }
    return out;
  }
  throw ValidationError("unknown behavior: " + text);
}

std::string PartyBehavior::describe() const {
  switch (kind) {
    case Kind::Honest:
      return "honest";
    case Kind::BasisLiar: {
      std::string out = "basis-liar:";
      for (int i = 0; i < 3; ++i) {
        if (i) out += ',';
        out += axis_name(static_cast<Axis>(i));
        out += '=';
        out += axis_name(liar_map[i]);
      }
      return out;
    }
    case Kind::FixedOutcome:
      return std::string("fixed:") + (fixed_bit ? "1" : "0");
    case Kind::Misaligned: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "misaligned:%.9g,%.9g", delta_theta,
                    delta_phi);
      return buf;
    }
  }
  throw ValidationError("invalid behavior kind");
}

namespace {

// One announced cell (claimed axis, b, c): true probability and Alice's
// normalized conditional Bloch vector.
struct CellStat {
  double p = 0.0;
  std::array<double, 3> r = {0.0, 0.0, 0.0};
};

using AxisCells = std::array<CellStat, 4>;

// What a party's announcement of outcome o effectively measures, per
// claimed axis. For measuring behaviors these are projectors; a
// fixed-outcome party contributes the identity on its constant bit.
struct PartyEffects {
  std::array<std::array<Mat2, 2>, 3> effect;
};

PartyEffects effects_for(const PartyBehavior& behavior,
                         const FrameAngle& protocol_frame) {
  PartyEffects out;
  if (behavior.kind == PartyBehavior::Kind::FixedOutcome) {
    for (int i = 0; i < 3; ++i) {
      out.effect[i][behavior.fixed_bit] = Mat2::Identity();
      out.effect[i][1 - behavior.fixed_bit] = Mat2::Zero();
    }
    return out;
  }
  FrameAngle frame = protocol_frame;
  if (behavior.kind == PartyBehavior::Kind::Misaligned) {
    frame = FrameAngle::canonical(protocol_frame.theta + behavior.delta_theta,
                                  protocol_frame.phi + behavior.delta_phi);
  }
  MeasurementTriad triad = rotated_pauli_triad(frame);
  for (int i = 0; i < 3; ++i) {
    int measured = behavior.kind == PartyBehavior::Kind::BasisLiar
                       ? static_cast<int>(behavior.liar_map[i])
                       : i;
    for (int o = 0; o < 2; ++o) {
      const Vec2& v = triad.bases[measured][o];
      out.effect[i][o] = v * v.adjoint();
    }
  }
  return out;
}

Eigen::Matrix4cd kron2(const Mat2& a, const Mat2& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    }
  }
  return out;
}

std::array<AxisCells, 3> exact_cells(const Vec& psi, const PartyEffects& bob,
                                     const PartyEffects& charlie) {
  Eigen::Vector4cd psi0 = psi.segment(0, 4);
  Eigen::Vector4cd psi1 = psi.segment(4, 4);
  std::array<AxisCells, 3> out;
  for (int i = 0; i < 3; ++i) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        Eigen::Matrix4cd joint = kron2(bob.effect[i][b], charlie.effect[i][c]);
        cplx m00 = (psi0.adjoint() * joint * psi0).value();
        cplx m11 = (psi1.adjoint() * joint * psi1).value();
        cplx m01 = (psi1.adjoint() * joint * psi0).value();
        CellStat& cell = out[i][b * 2 + c];
        cell.p = m00.real() + m11.real();
        if (cell.p > kInternalTol) {
          cell.r = {2.0 * m01.real() / cell.p, -2.0 * m01.imag() / cell.p,
                    (m00.real() - m11.real()) / cell.p};
        } else {
          // Impossible announcements leave sub-ulp arithmetic residue in p;
          // keep them at an exact zero so derived tables stay exact too.
          cell.p = 0.0;
        }
      }
    }
  }
  return out;
}

double cell_coherence(const std::array<double, 3>& r, int k) {
  static constexpr int kOther[3][2] = {{1, 2}, {0, 2}, {0, 1}};
  return std::hypot(r[kOther[k][0]], r[kOther[k][1]]);
}

// Diagonal-sum value restricted to the given claimed axes, computed from
// the true cells.
double exact_partial_lhs(const std::array<AxisCells, 3>& cells,
                         const std::vector<int>& axes) {
  double lhs = 0.0;
  for (int i : axes) {
    for (const CellStat& cell : cells[i]) {
      lhs += cell.p * cell_coherence(cell.r, i);
    }
  }
  return lhs;
}

// Tomography accumulator for the sampled estimator, split into contiguous
// batches so the spread of per-batch values yields a standard error.
struct TomographyCounts {
  int n_batches = 0;
  // [batch][axis]: rounds with that claimed axis
  std::vector<std::array<int, 3>> axis_rounds;
  // [batch][axis][cell]: announced-cell occupation
  std::vector<std::array<std::array<int, 4>, 3>> cell_rounds;
  // [batch][axis][cell][probe]: probe totals and +1 counts
  std::vector<std::array<std::array<std::array<int, 3>, 4>, 3>> probe_total;
  std::vector<std::array<std::array<std::array<int, 3>, 4>, 3>> probe_plus;

  explicit TomographyCounts(int batches)
      : n_batches(batches),
        axis_rounds(batches, std::array<int, 3>{}),
        cell_rounds(batches, std::array<std::array<int, 4>, 3>{}),
        probe_total(batches,
                    std::array<std::array<std::array<int, 3>, 4>, 3>{}),
        probe_plus(batches,
                   std::array<std::array<std::array<int, 3>, 4>, 3>{}) {}

  void add(int batch, int axis, int cell, int probe, int outcome) {
    axis_rounds[batch][axis] += 1;
    cell_rounds[batch][axis][cell] += 1;
    probe_total[batch][axis][cell][probe] += 1;
    if (outcome == 0) probe_plus[batch][axis][cell][probe] += 1;
  }
};

struct SampledEstimate {
  double lhs = 0.0;
  double std_error = 0.0;
  int usable_batches = 0;
  std::vector<std::string> warnings;
};

SampledEstimate estimate_from_counts(const TomographyCounts& counts,
                                     const std::vector<int>& axes) {
  SampledEstimate out;
  bool starved_probe = false;
  std::vector<double> batch_lhs;
  for (int batch = 0; batch < counts.n_batches; ++batch) {
    bool any_round = false;
    double lhs = 0.0;
    for (int i : axes) {
      int n_axis = counts.axis_rounds[batch][i];
      if (n_axis == 0) continue;
      any_round = true;
      for (int cell = 0; cell < 4; ++cell) {
        int n_cell = counts.cell_rounds[batch][i][cell];
        if (n_cell == 0) continue;
        std::array<double, 3> r = {0.0, 0.0, 0.0};
        for (int probe = 0; probe < 3; ++probe) {
          int total = counts.probe_total[batch][i][cell][probe];
          if (total == 0) {
            starved_probe = true;
            continue;
          }
          int plus = counts.probe_plus[batch][i][cell][probe];
          r[probe] = (2.0 * plus - total) / total;
        }
        // Empirical vectors can stick out of the Bloch ball; pull them back
        // before converting to a coherence.
        double norm = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
        if (norm > 1.0) {
          for (double& component : r) component /= norm;
        }
        double p_hat = static_cast<double>(n_cell) / n_axis;
        lhs += p_hat * cell_coherence(r, i);
      }
    }
    if (any_round) batch_lhs.push_back(lhs);
  }

  out.usable_batches = static_cast<int>(batch_lhs.size());
  if (out.usable_batches == 0) {
    out.warnings.push_back("no usable tomography batches");
    return out;
  }
  double mean = std::accumulate(batch_lhs.begin(), batch_lhs.end(), 0.0) /
                out.usable_batches;
  out.lhs = mean;
  if (out.usable_batches >= 2) {
    double ss = 0.0;
    for (double value : batch_lhs) ss += (value - mean) * (value - mean);
    out.std_error = std::sqrt(ss / (out.usable_batches - 1)) /
                    std::sqrt(static_cast<double>(out.usable_batches));
  } else {
    out.warnings.push_back("too few batches for a standard error");
  }
  if (starved_probe) {
    out.warnings.push_back(
        "some occupied cells missed a probe axis; those components were "
        "treated as zero");
  }
  return out;
}

void warn_unobserved_cells(const TomographyCounts& counts,
                           const std::vector<int>& axes,
                           const std::array<AxisCells, 3>& truth,
                           std::vector<std::string>* warnings) {
  for (int i : axes) {
    for (int cell = 0; cell < 4; ++cell) {
      if (truth[i][cell].p <= kInternalTol) continue;  // never occupied
      int total = 0;
      for (int batch = 0; batch < counts.n_batches; ++batch) {
        total += counts.cell_rounds[batch][i][cell];
      }
      if (total == 0) {
        std::string msg = "conditional cell axis=";
        msg += axis_name(static_cast<Axis>(i));
        msg += " b=" + std::to_string(cell / 2) +
               " c=" + std::to_string(cell % 2) +
               " received no rounds and was excluded";
        warnings->push_back(msg);
      }
    }
  }
}

// Draws announced outcomes (b,c) for one round from the cell table.
std::pair<int, int> sample_outcomes(const AxisCells& cells, Rng& bob_rng,
                                    Rng& charlie_rng) {
  double p_b0 = cells[0].p + cells[1].p;
  double total = p_b0 + cells[2].p + cells[3].p;
  int b = bob_rng.uniform01() * total < p_b0 ? 0 : 1;
  double row = cells[b * 2].p + cells[b * 2 + 1].p;
  int c = 1;
  if (row > 0.0 && charlie_rng.uniform01() * row < cells[b * 2].p) c = 0;
  return {b, c};
}

Eigen::MatrixXd key_table(const AxisCells& cells, int probe_axis) {
  Eigen::MatrixXd joint(2, 4);
  for (int cell = 0; cell < 4; ++cell) {
    double p0 = 0.5 * (1.0 + cells[cell].r[probe_axis]);
    p0 = std::clamp(p0, 0.0, 1.0);
    joint(0, cell) = cells[cell].p * p0;
    joint(1, cell) = cells[cell].p * (1.0 - p0);
  }
  return joint;
}

constexpr int kBatches = 10;

}  // namespace

QkaResult run_qka(const QkaConfig& config) {
  if (config.rounds < 1) {
    throw ValidationError("rounds must be positive");
  }
  if (!std::isfinite(config.threshold)) {
    throw ValidationError("threshold must be finite");
  }
  if (config.state.dim() != 8) {
    throw ValidationError("protocol state must be a three-qubit state");
  }
  config.protocol_frame.validate();

  PartyEffects bob = effects_for(config.bob, config.protocol_frame);
  PartyEffects charlie = effects_for(config.charlie, config.protocol_frame);
  std::array<AxisCells, 3> cells =
      exact_cells(config.state.amplitudes(), bob, charlie);
  const std::vector<int> all_axes = {0, 1, 2};

  QkaResult result;
  result.threshold = config.threshold;
  if (config.mode == ProtocolMode::Sampled && config.rounds <= 1000) {
    result.warnings.push_back(
        "sampled mode with 1000 rounds or fewer gives a coarse estimate");
  }

  Rng axis_rng = substream(config.seed, "axis");
  Rng bob_rng = substream(config.seed, "bob");
  Rng charlie_rng = substream(config.seed, "charlie");
  Rng probe_rng = substream(config.seed, "alice-axis");
  Rng alice_rng = substream(config.seed, "alice-outcome");

  bool sampled = config.mode == ProtocolMode::Sampled;
  TomographyCounts counts(kBatches);
  result.transcript.reserve(config.rounds);
  for (int round = 0; round < config.rounds; ++round) {
    int axis = static_cast<int>(axis_rng.below(3));
    auto [b, c] = sample_outcomes(cells[axis], bob_rng, charlie_rng);
    QkaRound record;
    record.index = round;
    record.axis = static_cast<Axis>(axis);
    record.b = b;
    record.c = c;
    if (sampled) {
      int probe = static_cast<int>(probe_rng.below(3));
      const CellStat& cell = cells[axis][b * 2 + c];
      double p0 = std::clamp(0.5 * (1.0 + cell.r[probe]), 0.0, 1.0);
      int outcome = alice_rng.uniform01() < p0 ? 0 : 1;
      record.alice_axis = probe;
      record.alice_outcome = outcome;
      int batch = static_cast<int>(
          static_cast<long long>(round) * kBatches / config.rounds);
      counts.add(batch, axis, b * 2 + c, probe, outcome);
    }
    result.transcript.push_back(record);

    // Claimed-x rounds pin Bob and Charlie together (escrow key); claimed-z
    // rounds make Alice's outcome the announced parity (collective key).
    if (axis == 0) {
      if (b == c) {
        result.escrow_key.push_back(b);
      } else {
        result.escrow_mismatches += 1;
      }
    } else if (axis == 2) {
      result.collective_key.push_back(b ^ c);
    }
  }

  if (sampled) {
    SampledEstimate estimate = estimate_from_counts(counts, all_axes);
    warn_unobserved_cells(counts, all_axes, cells, &estimate.warnings);
    result.lhs_estimate = estimate.lhs;
    result.std_error = estimate.std_error;
    result.authenticated = result.lhs_estimate >= config.threshold &&
                           estimate.usable_batches >= 2 &&
                           result.std_error < 0.05;
    result.warnings.insert(result.warnings.end(), estimate.warnings.begin(),
                           estimate.warnings.end());
  } else {
    result.lhs_estimate = exact_partial_lhs(cells, all_axes);
    result.std_error = 0.0;
    result.authenticated = result.lhs_estimate >= config.threshold;
  }

  // Key-rate bound from the analytic conditional tables: collective basis
  // is canonical x on claimed-z rounds, escrow basis canonical z on
  // claimed-x rounds.
  result.key_rate = key_rate_bound(key_table(cells[2], 0),
                                   key_table(cells[0], 2), Axis::X, Axis::Z);
  return result;
}

double conditional_entropy(const Eigen::MatrixXd& joint) {
  if (joint.size() == 0) {
    throw ValidationError("probability table must be nonempty");
  }
  double total = 0.0;
  for (int x = 0; x < joint.rows(); ++x) {
    for (int y = 0; y < joint.cols(); ++y) {
      double p = joint(x, y);
      if (!std::isfinite(p) || p < -kValidationTol) {
        throw ValidationError("probability table entries must be nonnegative");
      }
      total += p;
    }
  }
  if (std::abs(total - 1.0) > kValidationTol) {
    throw ValidationError("probability table must sum to one");
  }
  double h = 0.0;
  for (int y = 0; y < joint.cols(); ++y) {
    double p_y = joint.col(y).sum();
    if (p_y <= 0.0) continue;
    double h_y = 0.0;
    for (int x = 0; x < joint.rows(); ++x) {
      double p = joint(x, y) / p_y;
      if (p > 0.0) h_y -= p * std::log2(p);
    }
    h += p_y * h_y;
  }
  return h;
}

KeyRateReport key_rate_bound(const Eigen::MatrixXd& joint_k,
                             const Eigen::MatrixXd& joint_kp, Axis basis_k,
                             Axis basis_kp) {
  KeyRateReport report;
  report.basis_k = basis_k;
  report.basis_kp = basis_kp;
  report.entropy_k = conditional_entropy(joint_k);
  report.entropy_kp = conditional_entropy(joint_kp);

  MeasurementTriad canonical = rotated_pauli_triad(FrameAngle{0.0, 0.0});
  double v = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      cplx overlap = canonical.bases[static_cast<int>(basis_k)][a].dot(
          canonical.bases[static_cast<int>(basis_kp)][b]);
      v = std::max(v, std::norm(overlap));
    }
  }
  // Pauli eigenbasis overlaps are exactly 0, 1/2 or 1; snap away the
  // floating-point residue so the log2 floor stays exact.
  double snapped = std::round(v * 2.0) / 2.0;
  if (std::abs(v - snapped) < kValidationTol) v = snapped;
  report.v = v;
  report.identical_bases = basis_k == basis_kp;
  report.uncertainty_floor = std::log2(1.0 / v);
  report.r_min = report.uncertainty_floor - report.entropy_k - report.entropy_kp;
  if (report.identical_bases) {
    report.note =
        "identical key bases give v=1 and an uncertainty floor of 0 bits";
  } else {
    report.note =
        "v quoted as 2 in the protocol derivation lies outside the squared-"
        "overlap range (0,1]; the eigenvector-overlap value 1/2 is used";
  }
  return report;
}

QpcResult run_qpc(const QpcConfig& config) {
  if (config.secret_b.size() != config.secret_c.size()) {
    throw ValidationError("secrets must have equal length");
  }
  for (const std::vector<int>* secret : {&config.secret_b, &config.secret_c}) {
    for (int bit : *secret) {
      if (bit != 0 && bit != 1) {
        throw ValidationError("secrets must be bit sequences");
      }
    }
  }
  int n = static_cast<int>(config.secret_b.size());
  int total = config.total;
  if (total < 1) {
    throw ValidationError("total round count must be positive");
  }
  if (config.bias < 1) {
    throw ValidationError("basis bias must be at least 1:1");
  }
  int check = config.check;
  if (check == 0) {
    // Default designation: one round in (1 + bias) lands on the scarce
    // basis; the check takes all of those plus as many from the other.
    check = 2 * static_cast<int>(std::llround(
                    static_cast<double>(total) / (1.0 + config.bias)));
  }
  if (check < 2) {
    throw ValidationError("check needs at least one round per basis");
  }
  if (check >= total) {
    throw ValidationError("check count must be smaller than the total");
  }
  if (total < check + n) {
    throw ValidationError("not enough comparison rounds for the secrets");
  }
  if (!std::isfinite(config.threshold)) {
    throw ValidationError("threshold must be finite");
  }

  FrameAngle protocol_frame{kPi / 2.0, 0.0};
  PartyEffects bob = effects_for(config.bob, protocol_frame);
  PartyEffects charlie = effects_for(config.charlie, protocol_frame);
  std::array<AxisCells, 3> cells =
      exact_cells(ghz_state().amplitudes(), bob, charlie);
  // Claimed x is the physical-z check basis, claimed z the physical-x one.
  const std::vector<int> check_axes = {0, 2};

  // Designate round positions: a seeded shuffle picks the check set, the
  // physical-z half first.
  Rng designate_rng = substream(config.seed, "designate");
  std::vector<int> positions(total);
  std::iota(positions.begin(), positions.end(), 0);
  for (int i = total - 1; i > 0; --i) {
    int j = static_cast<int>(designate_rng.below(i + 1));
    std::swap(positions[i], positions[j]);
  }
  int z_checks = check / 2;
  // claimed axis per position, -1 for comparison rounds
  std::vector<int> claimed(total, -1);
  for (int idx = 0; idx < check; ++idx) {
    claimed[positions[idx]] = idx < z_checks ? 0 : 2;
  }
  std::vector<int> comparison;
  comparison.reserve(total - check);
  for (int pos = 0; pos < total; ++pos) {
    if (claimed[pos] == -1) comparison.push_back(pos);
  }

  QpcResult result;
  result.total = total;
  result.checked = check;
  result.check.rounds = check;
  result.check.threshold_effective = config.threshold * 2.0 / 3.0;

  Rng bob_rng = substream(config.seed, "bob");
  Rng charlie_rng = substream(config.seed, "charlie");
  Rng probe_rng = substream(config.seed, "alice-axis");
  Rng alice_rng = substream(config.seed, "alice-outcome");

  if (config.mode == ProtocolMode::Sampled) {
    TomographyCounts counts(kBatches);
    int check_index = 0;
    for (int pos = 0; pos < total; ++pos) {
      int axis = claimed[pos];
      if (axis == -1) continue;
      auto [b, c] = sample_outcomes(cells[axis], bob_rng, charlie_rng);
      int probe = static_cast<int>(probe_rng.below(3));
      const CellStat& cell = cells[axis][b * 2 + c];
      double p0 = std::clamp(0.5 * (1.0 + cell.r[probe]), 0.0, 1.0);
      int outcome = alice_rng.uniform01() < p0 ? 0 : 1;
      int batch = static_cast<int>(
          static_cast<long long>(check_index) * kBatches / check);
      counts.add(batch, axis, b * 2 + c, probe, outcome);
      ++check_index;
    }
    SampledEstimate estimate = estimate_from_counts(counts, check_axes);
    result.check.lhs_estimate = estimate.lhs;
    result.check.std_error = estimate.std_error;
    result.check.authenticated =
        estimate.lhs >= result.check.threshold_effective &&
        estimate.usable_batches >= 2 && estimate.std_error < 0.05;
  } else {
    result.check.lhs_estimate = exact_partial_lhs(cells, check_axes);
    result.check.std_error = 0.0;
    result.check.authenticated =
        result.check.lhs_estimate >= result.check.threshold_effective;
  }

  // Comparison rounds: everyone measures physical x. The three outcomes
  // have even parity, so Alice's bit equals x_B xor x_C and the masked
  // announcements reveal exactly s_B xor s_C per position.
  Rng compare_bob = substream(config.seed, "compare-bob");
  Rng compare_charlie = substream(config.seed, "compare-charlie");
  result.position_verdicts.reserve(n);
  bool all_equal = true;
  for (int idx = 0; idx < n; ++idx) {
    int x_b = static_cast<int>(compare_bob.below(2));
    int x_c = static_cast<int>(compare_charlie.below(2));
    int a = x_b ^ x_c;
    int r_b = x_b ^ config.secret_b[idx];
    int r_c = x_c ^ config.secret_c[idx];
    int verdict = a ^ r_b ^ r_c;
    result.position_verdicts.push_back(verdict);
    if (verdict) all_equal = false;
  }
  result.overall_equal = all_equal;

  if (!result.check.authenticated) {
    result.withheld = true;
    result.position_verdicts.clear();
    result.overall_equal = false;
  }
  return result;
}

}  // namespace steerkit
