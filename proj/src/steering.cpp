#include "steerkit/steering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

namespace steerkit {

const char* axis_name(Axis axis) {
  switch (axis) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
  }
  throw ValidationError("invalid axis");
}

Axis axis_from_name(const std::string& name) {
  if (name == "x") return Axis::X;
  if (name == "y") return Axis::Y;
  if (name == "z") return Axis::Z;
  throw ValidationError("unknown axis: " + name);
}

double l1_coherence(const Mat2& rho, const Vec2& b0, const Vec2& b1) {
  return 2.0 * std::abs((b0.adjoint() * rho * b1).value());
}

double l1_coherence(const DensityMatrix& rho, const Vec2& b0, const Vec2& b1) {
  if (rho.dim() != 2) {
    throw ValidationError("l1 coherence expects a qubit state");
  }
  return l1_coherence(Mat2(rho.entries()), b0, b1);
}

namespace {

// Unnormalized description of one conditional branch of Alice's state:
// branch probability p and the p-weighted Pauli expectations s. The
// coherence of the normalized state in canonical basis k, weighted by p,
// is then hypot of the two components of s perpendicular to k.
struct CellMoment {
  double p = 0.0;
  std::array<double, 3> s = {0.0, 0.0, 0.0};
};

CellMoment moment_from_unnormalized(const Mat2& m) {
  CellMoment out;
  out.p = m(0, 0).real() + m(1, 1).real();
  out.s = {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(),
           m(0, 0).real() - m(1, 1).real()};
  return out;
}

double weighted_coherence(const CellMoment& cell, int k) {
  static constexpr int kOther[3][2] = {{1, 2}, {0, 2}, {0, 1}};
  return std::hypot(cell.s[kOther[k][0]], cell.s[kOther[k][1]]);
}

using PairCells = std::array<CellMoment, 4>;
using SingleCells = std::array<CellMoment, 2>;

// Computes and caches the conditional branch moments for one state and one
// frame pair. Works directly on the amplitudes when the state is pure.
class BranchEvaluator {
 public:
  BranchEvaluator(const Vec* psi, const Mat* rho, const FrameAngle& frame_bob,
                  const FrameAngle& frame_charlie)
      : psi_(psi),
        rho_(rho),
        triad_bob_(rotated_pauli_triad(frame_bob)),
        triad_charlie_(rotated_pauli_triad(frame_charlie)) {}

  const PairCells& pair(int i, int j) {
    auto& slot = pair_[i][j];
    if (!slot) slot = compute_pair(i, j);
    return *slot;
  }

  const SingleCells& single(Subsystem party, int m) {
    auto& slot = party == Subsystem::B ? single_bob_[m] : single_charlie_[m];
    if (!slot) slot = compute_single(party, m);
    return *slot;
  }

  double term_pair(int i, int j, int k) {
    const PairCells& cells = pair(i, j);
    double sum = 0.0;
    for (const CellMoment& cell : cells) sum += weighted_coherence(cell, k);
    return sum;
  }

  double term_single(Subsystem party, int m, int k) {
    const SingleCells& cells = single(party, m);
    return weighted_coherence(cells[0], k) + weighted_coherence(cells[1], k);
  }

 private:
  PairCells compute_pair(int i, int j) const {
    PairCells out;
    for (int b = 0; b < 2; ++b) {
      const Vec2& vb = triad_bob_.bases[i][b];
      for (int c = 0; c < 2; ++c) {
        const Vec2& vc = triad_charlie_.bases[j][c];
        CellMoment& cell = out[b * 2 + c];
        if (psi_) {
          cplx a0 = 0.0, a1 = 0.0;
          for (int b1 = 0; b1 < 2; ++b1) {
            for (int c1 = 0; c1 < 2; ++c1) {
              cplx w = std::conj(vb(b1)) * std::conj(vc(c1));
              a0 += w * (*psi_)(b1 * 2 + c1);
              a1 += w * (*psi_)(4 + b1 * 2 + c1);
            }
          }
          cell = pure_moment(a0, a1);
        } else {
          Vec bc(4);
          for (int b1 = 0; b1 < 2; ++b1) {
            for (int c1 = 0; c1 < 2; ++c1) bc(b1 * 2 + c1) = vb(b1) * vc(c1);
          }
          Mat2 m;
          for (int a = 0; a < 2; ++a) {
            for (int ap = 0; ap < 2; ++ap) {
              m(a, ap) = (bc.adjoint() * rho_->block(a * 4, ap * 4, 4, 4) * bc)
                             .value();
            }
          }
          cell = moment_from_unnormalized(m);
        }
      }
    }
    return out;
  }

  SingleCells compute_single(Subsystem party, int m) const {
    const MeasurementTriad& tri =
        party == Subsystem::B ? triad_bob_ : triad_charlie_;
    SingleCells out;
    for (int b = 0; b < 2; ++b) {
      const Vec2& v = tri.bases[m][b];
      CellMoment& cell = out[b];
      if (psi_) {
        // Project the measuring party, keep Alice plus the spectator, and
        // accumulate Alice's reduced moments over the spectator index.
        Mat2 red = Mat2::Zero();
        for (int spectator = 0; spectator < 2; ++spectator) {
          cplx a0 = 0.0, a1 = 0.0;
          for (int o = 0; o < 2; ++o) {
            int low = party == Subsystem::B ? o * 2 + spectator
                                            : spectator * 2 + o;
            cplx w = std::conj(v(o));
            a0 += w * (*psi_)(low);
            a1 += w * (*psi_)(4 + low);
          }
          red(0, 0) += a0 * std::conj(a0);
          red(0, 1) += a0 * std::conj(a1);
          red(1, 0) += a1 * std::conj(a0);
          red(1, 1) += a1 * std::conj(a1);
        }
        cell = moment_from_unnormalized(red);
      } else {
        Mat2 red = Mat2::Zero();
        for (int a = 0; a < 2; ++a) {
          for (int ap = 0; ap < 2; ++ap) {
            cplx sum = 0.0;
            for (int spectator = 0; spectator < 2; ++spectator) {
              for (int o1 = 0; o1 < 2; ++o1) {
                for (int o2 = 0; o2 < 2; ++o2) {
                  int r = party == Subsystem::B ? o1 * 2 + spectator
                                                : spectator * 2 + o1;
                  int c = party == Subsystem::B ? o2 * 2 + spectator
                                                : spectator * 2 + o2;
                  sum += std::conj(v(o1)) * v(o2) *
                         (*rho_)(a * 4 + r, ap * 4 + c);
                }
              }
            }
            red(a, ap) = sum;
          }
        }
        cell = moment_from_unnormalized(red);
      }
    }
    return out;
  }

  static CellMoment pure_moment(cplx a0, cplx a1) {
    CellMoment cell;
    double n0 = std::norm(a0);
    double n1 = std::norm(a1);
    cplx off = a0 * std::conj(a1);
    cell.p = n0 + n1;
    cell.s = {2.0 * off.real(), -2.0 * off.imag(), n0 - n1};
    return cell;
  }

  const Vec* psi_ = nullptr;
  const Mat* rho_ = nullptr;
  MeasurementTriad triad_bob_;
  MeasurementTriad triad_charlie_;
  std::optional<PairCells> pair_[3][3];
  std::optional<SingleCells> single_bob_[3];
  std::optional<SingleCells> single_charlie_[3];
};

double evaluate_lhs(BranchEvaluator& eval, const InequalitySpec& spec) {
  double lhs = 0.0;
  if (spec.scope == Scope::Pair) {
    for (const auto& [i, j, k] : spec.triples) lhs += eval.term_pair(i, j, k);
  } else {
    Subsystem party =
        spec.scope == Scope::BobOnly ? Subsystem::B : Subsystem::C;
    for (const auto& [m, k] : spec.pairs) lhs += eval.term_single(party, m, k);
  }
  return lhs;
}

ViolationReport make_report(const InequalitySpec& spec, double lhs,
                            const FrameAngle& frame_bob,
                            const FrameAngle& frame_charlie) {
  ViolationReport report;
  report.inequality = spec.id;
  report.lhs = lhs;
  report.bound = spec.bound();
  report.violated = lhs > report.bound;
  report.frame_bob = frame_bob;
  report.frame_charlie = frame_charlie;
  return report;
}

std::vector<std::array<int, 3>> admitted_triples(InequalityId id) {
  std::vector<std::array<int, 3>> out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        bool admit = false;
        switch (id) {
          case InequalityId::S1BobOffdiag: admit = i != k; break;
          case InequalityId::S1CharlieOffdiag: admit = j != k; break;
          case InequalityId::S1Diag: admit = i == j && j == k; break;
          case InequalityId::S1IjEqNeqK: admit = i == j && j != k; break;
          case InequalityId::S1JkEqNeqI: admit = j == k && i != j; break;
          case InequalityId::S1IkEqNeqJ: admit = i == k && i != j; break;
          default: break;
        }
        if (admit) out.push_back({i, j, k});
      }
    }
  }
  return out;
}

std::vector<std::array<int, 2>> admitted_pairs(InequalityId id) {
  bool diagonal = id == InequalityId::S2BobDiag || id == InequalityId::S2CharlieDiag;
  std::vector<std::array<int, 2>> out;
  for (int m = 0; m < 3; ++m) {
    for (int k = 0; k < 3; ++k) {
      if ((m == k) == diagonal) out.push_back({m, k});
    }
  }
  return out;
}

InequalitySpec make_spec(InequalityId id, Scope scope, int multiplier) {
  InequalitySpec spec;
  spec.id = id;
  spec.scope = scope;
  spec.bound_multiplier = multiplier;
  spec.epsilon = std::sqrt(6.0);
  if (scope == Scope::Pair) {
    spec.triples = admitted_triples(id);
  } else {
    spec.pairs = admitted_pairs(id);
  }
  return spec;
}

}  // namespace

const std::array<InequalitySpec, 10>& inequality_catalog() {
  static const std::array<InequalitySpec, 10> catalog = {
      make_spec(InequalityId::S1BobOffdiag, Scope::Pair, 6),
      make_spec(InequalityId::S1CharlieOffdiag, Scope::Pair, 6),
      make_spec(InequalityId::S1Diag, Scope::Pair, 1),
      make_spec(InequalityId::S1IjEqNeqK, Scope::Pair, 2),
      make_spec(InequalityId::S1JkEqNeqI, Scope::Pair, 2),
      make_spec(InequalityId::S1IkEqNeqJ, Scope::Pair, 2),
      make_spec(InequalityId::S2BobDiag, Scope::BobOnly, 1),
      make_spec(InequalityId::S2BobOff, Scope::BobOnly, 2),
      make_spec(InequalityId::S2CharlieDiag, Scope::CharlieOnly, 1),
      make_spec(InequalityId::S2CharlieOff, Scope::CharlieOnly, 2),
  };
  return catalog;
}

const InequalitySpec& inequality_by_id(InequalityId id) {
  return inequality_catalog()[static_cast<int>(id)];
}

namespace {

constexpr const char* kInequalityNames[10] = {
    "s1-bob-offdiag", "s1-charlie-offdiag", "s1-diag", "s1-ij-eq-neqk",
    "s1-jk-eq-neqi",  "s1-ik-eq-neqj",      "s2b-diag", "s2b-off",
    "s2c-diag",       "s2c-off",
};

}  // namespace

InequalityId inequality_id_from_name(const std::string& name) {
  for (int i = 0; i < 10; ++i) {
    if (name == kInequalityNames[i]) return static_cast<InequalityId>(i);
  }
  throw ValidationError("unknown inequality: " + name);
}

std::string inequality_id_name(InequalityId id) {
  return kInequalityNames[static_cast<int>(id)];
}

namespace {

std::string frame_text(const FrameAngle& frame) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "(%.6f,%.6f)", frame.theta, frame.phi);
  return buf;
}

EnsembleBranch branch_from_moment(const Mat2& unnormalized, int b, int c) {
  EnsembleBranch branch;
  branch.b = b;
  branch.c = c;
  double p = unnormalized.trace().real();
  branch.probability = std::max(p, 0.0);
  if (branch.probability > kInternalTol) {
    branch.state = unnormalized / p;
    branch.defined = true;
  }
  return branch;
}

}  // namespace

ConditionalEnsemble conditional_ensemble_pair(const DensityMatrix& rho_abc,
                                              Axis i, Axis j,
                                              const FrameAngle& frame_bob,
                                              const FrameAngle& frame_charlie) {
  if (rho_abc.dim() != 8) {
    throw ValidationError("pair conditioning expects a three-qubit state");
  }
  MeasurementTriad tb = rotated_pauli_triad(frame_bob);
  MeasurementTriad tc = rotated_pauli_triad(frame_charlie);
  const Mat& rho = rho_abc.entries();

  ConditionalEnsemble ens;
  ens.conditioning = std::string("bob:") + axis_name(i) + "@" +
                     frame_text(frame_bob) + " charlie:" + axis_name(j) + "@" +
                     frame_text(frame_charlie);
  for (int b = 0; b < 2; ++b) {
    const Vec2& vb = tb.bases[static_cast<int>(i)][b];
    for (int c = 0; c < 2; ++c) {
      const Vec2& vc = tc.bases[static_cast<int>(j)][c];
      Vec bc(4);
      for (int b1 = 0; b1 < 2; ++b1) {
        for (int c1 = 0; c1 < 2; ++c1) bc(b1 * 2 + c1) = vb(b1) * vc(c1);
      }
      Mat2 m;
      for (int a = 0; a < 2; ++a) {
        for (int ap = 0; ap < 2; ++ap) {
          m(a, ap) = (bc.adjoint() * rho.block(a * 4, ap * 4, 4, 4) * bc).value();
        }
      }
      ens.branches.push_back(branch_from_moment(m, b, c));
    }
  }
  return ens;
}

ConditionalEnsemble conditional_ensemble_single(const DensityMatrix& rho_abc,
                                                Subsystem party, Axis axis,
                                                const FrameAngle& frame) {
  if (rho_abc.dim() != 8) {
    throw ValidationError("single conditioning expects a three-qubit state");
  }
  if (party != Subsystem::B && party != Subsystem::C) {
    throw ValidationError("conditioning party must be Bob or Charlie");
  }
  MeasurementTriad triad = rotated_pauli_triad(frame);
  const Mat& rho = rho_abc.entries();

  ConditionalEnsemble ens;
  ens.conditioning = std::string(party == Subsystem::B ? "bob:" : "charlie:") +
                     axis_name(axis) + "@" + frame_text(frame);
  for (int b = 0; b < 2; ++b) {
    const Vec2& v = triad.bases[static_cast<int>(axis)][b];
    Mat2 red = Mat2::Zero();
    for (int a = 0; a < 2; ++a) {
      for (int ap = 0; ap < 2; ++ap) {
        cplx sum = 0.0;
        for (int spectator = 0; spectator < 2; ++spectator) {
          for (int o1 = 0; o1 < 2; ++o1) {
            for (int o2 = 0; o2 < 2; ++o2) {
              int r = party == Subsystem::B ? o1 * 2 + spectator
                                            : spectator * 2 + o1;
              int c = party == Subsystem::B ? o2 * 2 + spectator
                                            : spectator * 2 + o2;
              sum += std::conj(v(o1)) * v(o2) * rho(a * 4 + r, ap * 4 + c);
            }
          }
        }
        red(a, ap) = sum;
      }
    }
    EnsembleBranch branch = branch_from_moment(red, -1, -1);
    (party == Subsystem::B ? branch.b : branch.c) = b;
    ens.branches.push_back(branch);
  }
  return ens;
}

ViolationReport evaluate_inequality(const DensityMatrix& rho_abc,
                                    const InequalitySpec& spec,
                                    const FrameAngle& frame_bob,
                                    const FrameAngle& frame_charlie) {
  if (rho_abc.dim() != 8) {
    throw ValidationError("inequality evaluation expects a three-qubit state");
  }
  BranchEvaluator eval(nullptr, &rho_abc.entries(), frame_bob, frame_charlie);
  return make_report(spec, evaluate_lhs(eval, spec), frame_bob, frame_charlie);
}

ViolationReport evaluate_inequality(const StateVector& psi_abc,
                                    const InequalitySpec& spec,
                                    const FrameAngle& frame_bob,
                                    const FrameAngle& frame_charlie) {
  if (psi_abc.dim() != 8) {
    throw ValidationError("inequality evaluation expects a three-qubit state");
  }
  BranchEvaluator eval(&psi_abc.amplitudes(), nullptr, frame_bob,
                       frame_charlie);
  return make_report(spec, evaluate_lhs(eval, spec), frame_bob, frame_charlie);
}

void LHSEnsemble::validate() const {
  size_t n = weights.size();
  if (n == 0 || hidden_states.size() != n || response.size() != n) {
    throw ValidationError("hidden state model fields must have equal size");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < -kValidationTol) {
      throw ValidationError("hidden state weights must be nonnegative");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kValidationTol) {
    throw ValidationError("hidden state weights must sum to one");
  }
  for (const Mat2& state : hidden_states) {
    DensityMatrix check((Mat(state)));  // reuses the full state validation
    (void)check;
  }
  for (const auto& per_lambda : response) {
    for (const auto& per_i : per_lambda) {
      for (const auto& row : per_i) {
        double sum = 0.0;
        for (double p : row) {
          if (!std::isfinite(p) || p < -kValidationTol) {
            throw ValidationError("response probabilities must be nonnegative");
          }
          sum += p;
        }
        if (std::abs(sum - 1.0) > kValidationTol) {
          throw ValidationError("response rows must sum to one");
        }
      }
    }
  }
}

ConditionalEnsemble lhs_joint_model(const LHSEnsemble& model, Axis i, Axis j) {
  model.validate();
  int ii = static_cast<int>(i);
  int jj = static_cast<int>(j);
  ConditionalEnsemble ens;
  ens.conditioning =
      std::string("model bob:") + axis_name(i) + " charlie:" + axis_name(j);
  for (int b = 0; b < 2; ++b) {
    for (int c = 0; c < 2; ++c) {
      Mat2 m = Mat2::Zero();
      for (size_t l = 0; l < model.weights.size(); ++l) {
        m += model.weights[l] * model.response[l][ii][jj][b * 2 + c] *
             model.hidden_states[l];
      }
      ens.branches.push_back(branch_from_moment(m, b, c));
    }
  }
  return ens;
}

ViolationReport evaluate_inequality(const LHSEnsemble& model,
                                    const InequalitySpec& spec) {
  model.validate();
  size_t n = model.weights.size();
  std::vector<CellMoment> states(n);
  for (size_t l = 0; l < n; ++l) {
    states[l] = moment_from_unnormalized(model.hidden_states[l]);
  }

  auto pair_cell = [&](int i, int j, int b, int c) {
    CellMoment cell;
    for (size_t l = 0; l < n; ++l) {
      double w = model.weights[l] * model.response[l][i][j][b * 2 + c];
      cell.p += w * states[l].p;
      for (int t = 0; t < 3; ++t) cell.s[t] += w * states[l].s[t];
    }
    return cell;
  };

  double lhs = 0.0;
  if (spec.scope == Scope::Pair) {
    for (const auto& [i, j, k] : spec.triples) {
      for (int b = 0; b < 2; ++b) {
        for (int c = 0; c < 2; ++c) {
          lhs += weighted_coherence(pair_cell(i, j, b, c), k);
        }
      }
    }
  } else {
    // Single-party marginal: average uniformly over the unconditioned
    // party's axis, then sum out its outcome.
    bool bob = spec.scope == Scope::BobOnly;
    for (const auto& [m, k] : spec.pairs) {
      for (int o = 0; o < 2; ++o) {
        CellMoment cell;
        for (int other_axis = 0; other_axis < 3; ++other_axis) {
          for (int other_outcome = 0; other_outcome < 2; ++other_outcome) {
            int i = bob ? m : other_axis;
            int j = bob ? other_axis : m;
            int b = bob ? o : other_outcome;
            int c = bob ? other_outcome : o;
            CellMoment part = pair_cell(i, j, b, c);
            cell.p += part.p / 3.0;
            for (int t = 0; t < 3; ++t) cell.s[t] += part.s[t] / 3.0;
          }
        }
        lhs += weighted_coherence(cell, k);
      }
    }
  }
  return make_report(spec, lhs, FrameAngle{}, FrameAngle{});
}

LHSEnsemble random_lhs_ensemble(Rng& rng, int max_states) {
  if (max_states < 1) {
    throw ValidationError("max_states must be positive");
  }
  int n = 1 + static_cast<int>(rng.below(static_cast<std::uint32_t>(max_states)));
  LHSEnsemble model;
  model.weights.resize(n);
  model.hidden_states.resize(n);
  model.response.resize(n);

  auto positive_draw = [&] { return -std::log(1.0 - rng.uniform01()); };

  double total = 0.0;
  for (int l = 0; l < n; ++l) {
    model.weights[l] = positive_draw();
    total += model.weights[l];
  }
  for (int l = 0; l < n; ++l) model.weights[l] /= total;

  for (int l = 0; l < n; ++l) {
    // Uniform over the Bloch ball: uniform direction, radius ~ u^(1/3).
    double z = 2.0 * rng.uniform01() - 1.0;
    double azimuth = 2.0 * kPi * rng.uniform01();
    double r = std::cbrt(rng.uniform01());
    double sxy = std::sqrt(std::max(0.0, 1.0 - z * z));
    double rx = r * sxy * std::cos(azimuth);
    double ry = r * sxy * std::sin(azimuth);
    double rz = r * z;
    Mat2 state;
    state << cplx(0.5 * (1.0 + rz), 0.0), cplx(0.5 * rx, -0.5 * ry),
        cplx(0.5 * rx, 0.5 * ry), cplx(0.5 * (1.0 - rz), 0.0);
    model.hidden_states[l] = state;

    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double sum = 0.0;
        for (int o = 0; o < 4; ++o) {
          model.response[l][i][j][o] = positive_draw();
          sum += model.response[l][i][j][o];
        }
        for (int o = 0; o < 4; ++o) model.response[l][i][j][o] /= sum;
      }
    }
  }
  model.validate();
  return model;
}

double concurrence(const DensityMatrix& rho_pair) {
  if (rho_pair.dim() != 4) {
    throw ValidationError("concurrence expects a two-qubit state");
  }
  const Mat& rho = rho_pair.entries();
  // Spin-flip: (sigma_y x sigma_y) conj(rho) (sigma_y x sigma_y).
  Mat yy = Mat::Zero(4, 4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  Mat flipped = yy * rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<Mat> es(rho * flipped);
  std::array<double, 4> lambdas;
  for (int i = 0; i < 4; ++i) {
    lambdas[i] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
  }
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
  return std::max(0.0, lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]);
}

}  // namespace steerkit
