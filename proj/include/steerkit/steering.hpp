#pragma once

// Coherence-based steering detection: l1 coherence of Alice's conditional
// states, the ten-inequality catalog over rotated Pauli triads, and local
// hidden state models used to certify the classical side of each bound.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "steerkit/rng.hpp"
#include "steerkit/state.hpp"

namespace steerkit {

enum class Axis { X = 0, Y = 1, Z = 2 };

const char* axis_name(Axis axis);
Axis axis_from_name(const std::string& name);

// Sum of off-diagonal magnitudes of a qubit state expressed in the given
// orthonormal basis; for a qubit this is 2|<b0|rho|b1>|.
double l1_coherence(const DensityMatrix& rho, const Vec2& b0, const Vec2& b1);
double l1_coherence(const Mat2& rho, const Vec2& b0, const Vec2& b1);

// One branch of a conditional decomposition of Alice's state. Outcomes
// are -1 for a party that did not measure. Branches with probability
// below kInternalTol carry no defined state.
struct EnsembleBranch {
  int b = -1;
  int c = -1;
  double probability = 0.0;
  Mat2 state = Mat2::Zero();
  bool defined = false;
};

struct ConditionalEnsemble {
  std::string conditioning;
  std::vector<EnsembleBranch> branches;
};

// Alice's states conditioned on Bob measuring axis i and Charlie measuring
// axis j in their respective frames. Four branches in (b,c) order
// (0,0),(0,1),(1,0),(1,1).
ConditionalEnsemble conditional_ensemble_pair(const DensityMatrix& rho_abc,
                                              Axis i, Axis j,
                                              const FrameAngle& frame_bob,
                                              const FrameAngle& frame_charlie);

// Conditioning on a single party (Bob or Charlie), tracing out the other.
ConditionalEnsemble conditional_ensemble_single(const DensityMatrix& rho_abc,
                                                Subsystem party, Axis axis,
                                                const FrameAngle& frame);

enum class InequalityId {
  S1BobOffdiag = 0,
  S1CharlieOffdiag,
  S1Diag,
  S1IjEqNeqK,
  S1JkEqNeqI,
  S1IkEqNeqJ,
  S2BobDiag,
  S2BobOff,
  S2CharlieDiag,
  S2CharlieOff,
};

enum class Scope { Pair, BobOnly, CharlieOnly };

// One catalog entry: which (i,j,k) or (m,k) index combinations enter the
// sum, and the multiple of epsilon = sqrt(6) on the right-hand side.
struct InequalitySpec {
  InequalityId id;
  Scope scope;
  int bound_multiplier;
  // Pair scope: admitted (i,j,k) triples. Single scope: admitted
  // (conditioning axis, coherence axis) pairs.
  std::vector<std::array<int, 3>> triples;
  std::vector<std::array<int, 2>> pairs;
  double epsilon = 0.0;

  double bound() const { return bound_multiplier * epsilon; }
  // Each admitted term is a probability-weighted coherence, at most 1.
  double theoretical_max() const {
    return static_cast<double>(scope == Scope::Pair ? triples.size()
                                                    : pairs.size());
  }
};

const std::array<InequalitySpec, 10>& inequality_catalog();
const InequalitySpec& inequality_by_id(InequalityId id);
InequalityId inequality_id_from_name(const std::string& name);
std::string inequality_id_name(InequalityId id);

struct ViolationReport {
  InequalityId inequality;
  double lhs = 0.0;
  double bound = 0.0;
  bool violated = false;  // strict: lhs > bound
  FrameAngle frame_bob;
  FrameAngle frame_charlie;
};

ViolationReport evaluate_inequality(const DensityMatrix& rho_abc,
                                    const InequalitySpec& spec,
                                    const FrameAngle& frame_bob,
                                    const FrameAngle& frame_charlie);
// Pure-state path; produces the same numbers without forming the 8x8
// density matrix.
ViolationReport evaluate_inequality(const StateVector& psi_abc,
                                    const InequalitySpec& spec,
                                    const FrameAngle& frame_bob,
                                    const FrameAngle& frame_charlie);

// Discrete simulable model: hidden variable lambda with weight w_lambda,
// a qubit state for Alice per lambda, and response probabilities
// P(b,c|i,j,lambda) over announced outcomes.
struct LHSEnsemble {
  std::vector<double> weights;
  std::vector<Mat2> hidden_states;
  // response[lambda][i][j][b*2+c]
  std::vector<std::array<std::array<std::array<double, 4>, 3>, 3>> response;

  void validate() const;
};

// The conditional ensemble the model induces for conditioning axes (i,j).
ConditionalEnsemble lhs_joint_model(const LHSEnsemble& model, Axis i, Axis j);

// Catalog evaluation against a hidden state model. Single-party sums use
// the model's marginal over the other party, averaged uniformly over that
// party's conditioning axis. Frames do not enter: the model responds to
// axis labels directly.
ViolationReport evaluate_inequality(const LHSEnsemble& model,
                                    const InequalitySpec& spec);

// Random model with up to max_states hidden states, Bloch-ball states and
// flat-Dirichlet response rows. Always passes validate().
LHSEnsemble random_lhs_ensemble(Rng& rng, int max_states = 8);

// Two-qubit concurrence, zero for separable states.
double concurrence(const DensityMatrix& rho_pair);

}  // namespace steerkit
