#pragma once

// Round-based simulation of the key-authentication protocol (QKA) and the
// private-comparison protocol built on it (QPC), with honest and
// adversarial parties, plus the entropy and key-rate bookkeeping.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "steerkit/steering.hpp"

namespace steerkit {

enum class ProtocolMode { Exact, Sampled };

ProtocolMode protocol_mode_from_name(const std::string& name);
std::string protocol_mode_name(ProtocolMode mode);

// What a measuring party actually does each round. Honest parties measure
// the announced axis in the protocol frame; basis liars measure a fixed
// remapping of it; fixed-outcome parties skip the measurement and announce
// a constant; misaligned parties use an offset frame.
struct PartyBehavior {
  enum class Kind { Honest, BasisLiar, FixedOutcome, Misaligned };

  Kind kind = Kind::Honest;
  std::array<Axis, 3> liar_map = {Axis::X, Axis::Y, Axis::Z};
  int fixed_bit = 0;
  double delta_theta = 0.0;
  double delta_phi = 0.0;

  // Text forms: "honest", "basis-liar:x=z,y=z,z=z", "fixed:0",
  // "misaligned:0.3,0".
  static PartyBehavior parse(const std::string& text);
  std::string describe() const;
};

struct QkaConfig {
  int rounds = 1000;
  ProtocolMode mode = ProtocolMode::Exact;
  std::uint64_t seed = 0;
  double threshold = 2.9;
  FrameAngle protocol_frame{kPi / 2.0, 0.0};
  StateVector state = ghz_state();
  PartyBehavior bob;
  PartyBehavior charlie;
};

struct QkaRound {
  int index = 0;
  Axis axis = Axis::X;       // shared announced axis
  int b = 0;
  int c = 0;
  int alice_axis = -1;       // tomography probe axis, -1 in exact mode
  int alice_outcome = -1;
};

struct KeyRateReport {
  Axis basis_k = Axis::X;    // collective key basis
  Axis basis_kp = Axis::Z;   // escrow key basis
  double entropy_k = 0.0;    // H of the basis-k outcome given the (b,c) pair
  double entropy_kp = 0.0;
  double v = 0.0;            // max squared eigenvector overlap of the bases
  double uncertainty_floor = 0.0;  // log2(1/v)
  double r_min = 0.0;        // uncertainty_floor - entropy_k - entropy_kp
  bool identical_bases = false;
  std::string note;
};

struct QkaResult {
  std::vector<QkaRound> transcript;
  double lhs_estimate = 0.0;
  double std_error = 0.0;    // 0 in exact mode
  double threshold = 0.0;
  bool authenticated = false;
  // Rounds whose announced axis pins Bob and Charlie into equal outcomes
  // yield a key they share directly (escrow); rounds whose announced axis
  // makes Alice's outcome the pair parity yield a key only the pair can
  // reconstruct jointly (collective).
  std::vector<int> escrow_key;
  std::vector<int> collective_key;
  int escrow_mismatches = 0;
  KeyRateReport key_rate;
  std::vector<std::string> warnings;
};

QkaResult run_qka(const QkaConfig& config);

// H(X|Y) in bits for a joint table with rows indexed by x and columns by y.
double conditional_entropy(const Eigen::MatrixXd& joint);

// Bound on the distillable key rate from the two conditional tables
// p(alice outcome in basis, announced pair). Reported without clipping;
// negative values signal that no key is guaranteed.
KeyRateReport key_rate_bound(const Eigen::MatrixXd& joint_k,
                             const Eigen::MatrixXd& joint_kp, Axis basis_k,
                             Axis basis_kp);

struct QpcConfig {
  std::vector<int> secret_b;
  std::vector<int> secret_c;
  int total = 0;             // GHZ copies L
  int check = 0;             // check rounds l; 0 derives it from the bias
  int bias = 3;              // basis designation odds, x-designated : z
  ProtocolMode mode = ProtocolMode::Exact;
  std::uint64_t seed = 0;
  double threshold = 2.9;    // full three-axis threshold, scaled internally
  PartyBehavior bob;
  PartyBehavior charlie;
};

struct QpcCheckSummary {
  double lhs_estimate = 0.0;
  double std_error = 0.0;
  double threshold_effective = 0.0;  // threshold scaled to the two-axis sum
  bool authenticated = false;
  int rounds = 0;
};

struct QpcResult {
  std::vector<int> position_verdicts;  // 0 equal, 1 unequal; empty if withheld
  bool overall_equal = false;
  bool withheld = false;
  QpcCheckSummary check;
  int total = 0;
  int checked = 0;
};

QpcResult run_qpc(const QpcConfig& config);

}  // namespace steerkit
