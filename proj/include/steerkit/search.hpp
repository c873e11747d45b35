#pragma once

// Frame optimization and derived studies: per-inequality maxima over
// measurement frames, the alpha scan of the generalized GHZ family, the
// collective-steering classifier, and the fixed reference-pair audit.

#include <array>
#include <string>
#include <vector>

#include "steerkit/steering.hpp"

namespace steerkit {

struct SearchConfig {
  // Tied-frame stage: theta gets grid_n + 1 samples of [0, pi], phi gets
  // grid_n samples of [0, 2pi).
  int grid_n = 64;
  // Per-axis resolution of the four-dimensional stage used when Bob's and
  // Charlie's frames vary independently.
  int grid_n_independent = 20;
  int refine_iters = 200;
  double tol = 1e-9;
  bool independent_frames = false;
};

struct MaximizeResult {
  FrameAngle frame_bob;
  FrameAngle frame_charlie;
  double lhs = 0.0;
  ViolationReport report;
};

MaximizeResult maximize_violation(const StateVector& psi,
                                  const InequalitySpec& spec,
                                  const SearchConfig& config = {});
MaximizeResult maximize_violation(const DensityMatrix& rho,
                                  const InequalitySpec& spec,
                                  const SearchConfig& config = {});

enum class FramePolicy { Fixed, Optimized };

struct ScanSample {
  double alpha = 0.0;
  double lhs = 0.0;
  double bound = 0.0;
};

struct ScanCurve {
  FramePolicy policy = FramePolicy::Fixed;
  FrameAngle fixed_frame;
  std::vector<ScanSample> samples;
};

// Diagonal set-I sum across the generalized GHZ family, alpha sampled
// uniformly on [0, 1]. Fixed policy evaluates at fixed_frame (tied);
// Optimized re-optimizes the frame at every sample.
ScanCurve alpha_scan(int steps, FramePolicy policy,
                     const FrameAngle& fixed_frame,
                     const SearchConfig& config = {});

enum class SteeringLabel {
  Inconclusive,
  CollectiveWitnessed,
  IndividuallySteerable,
  BothSetsViolated,
};

std::string steering_label_name(SteeringLabel label);

struct ClassificationResult {
  SteeringLabel label = SteeringLabel::Inconclusive;
  std::array<MaximizeResult, 10> per_inequality;  // catalog order
  double concurrence_ab = 0.0;
  double concurrence_ac = 0.0;
};

// Optimizes every catalog entry, then attributes the violation pattern:
// no set-I violation is inconclusive; set-I without set-II witnesses
// collective steering; both sets with a vanishing pair concurrence means
// the steering is carried by the one entangled pair.
ClassificationResult classify_collective(const StateVector& psi,
                                         const SearchConfig& config = {});

struct ReferencePairEntry {
  InequalityId id;
  double lhs = 0.0;
  double bound = 0.0;
  bool violated = false;
  double state_max = 0.0;  // tied-frame maximum for this state
  bool attains_state_max = false;
  bool attains_theoretical_max = false;
};

struct ReferencePairResult {
  std::string state_label;
  FrameAngle frame;  // tied frame shared by Bob and Charlie
  std::array<ReferencePairEntry, 10> entries;
};

// Evaluates the full catalog at six fixed state and tied-frame pairs and
// reports, per inequality, whether the fixed frame already attains the
// state's tied-frame maximum or the theoretical maximum.
std::vector<ReferencePairResult> appendix_b_check(
    const SearchConfig& config = {});

}  // namespace steerkit
