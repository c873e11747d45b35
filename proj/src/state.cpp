#include "steerkit/state.hpp"

#include <cmath>

namespace steerkit {

void FrameAngle::validate() const {
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw ValidationError("frame angles must be finite");
  }
  if (theta < -kValidationTol || theta > kPi + kValidationTol) {
    throw ValidationError("theta must lie in [0, pi]");
  }
  if (phi < -kValidationTol || phi >= 2.0 * kPi + kValidationTol) {
    throw ValidationError("phi must lie in [0, 2pi)");
  }
}

FrameAngle FrameAngle::canonical(double theta, double phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw ValidationError("frame angles must be finite");
  }
  double t = std::fmod(theta, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  if (t > kPi) {
    // Same triad with the x and y outcomes relabeled, so fold it back.
    t = 2.0 * kPi - t;
    phi += kPi;
  }
  double p = std::fmod(phi, 2.0 * kPi);
  if (p < 0.0) p += 2.0 * kPi;
  if (p >= 2.0 * kPi) p = 0.0;
  return FrameAngle{t, p};
}

namespace {

int qubit_count(int dim) {
  switch (dim) {
    case 2: return 1;
    case 4: return 2;
    case 8: return 3;
    default:
      throw ValidationError("dimension must be 2, 4 or 8");
  }
}

}  // namespace

StateVector::StateVector(Vec amplitudes) : amp_(std::move(amplitudes)) {
  qubits_ = qubit_count(static_cast<int>(amp_.size()));
  if (!amp_.allFinite()) {
    throw ValidationError("amplitudes must be finite");
  }
  if (std::abs(amp_.norm() - 1.0) > kValidationTol) {
    throw ValidationError("state vector must be normalized");
  }
}

DensityMatrix::DensityMatrix(Mat entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols()) {
    throw ValidationError("density matrix must be square");
  }
  qubit_count(static_cast<int>(m_.rows()));
  if (!m_.allFinite()) {
    throw ValidationError("density matrix entries must be finite");
  }
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kValidationTol) {
    throw ValidationError("density matrix must be Hermitian");
  }
  if (std::abs(m_.trace().real() - 1.0) > kValidationTol ||
      std::abs(m_.trace().imag()) > kValidationTol) {
    throw ValidationError("density matrix must have unit trace");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kValidationTol) {
    throw ValidationError("density matrix must be positive semidefinite");
  }
}

StateVector tensor_product(const StateVector& a, const StateVector& b) {
  if (a.qubits() + b.qubits() > 3) {
    throw ValidationError("tensor product exceeds three qubits");
  }
  Vec out(a.dim() * b.dim());
  for (int i = 0; i < a.dim(); ++i) {
    out.segment(i * b.dim(), b.dim()) = a[i] * b.amplitudes();
  }
  return StateVector(out);
}

DensityMatrix density_from_vector(const StateVector& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<Subsystem>& keep) {
  if (rho.dim() != 8) {
    throw ValidationError("partial trace expects a three-qubit state");
  }
  bool kept[3] = {false, false, false};
  for (Subsystem s : keep) {
    int idx = static_cast<int>(s);
    if (idx < 0 || idx > 2 || kept[idx]) {
      throw ValidationError("keep list must name distinct subsystems");
    }
    kept[idx] = true;
  }
  int n_keep = static_cast<int>(keep.size());
  if (n_keep == 0 || n_keep == 3) {
    throw ValidationError("keep list must be a nonempty proper subset");
  }

  // Bit q of a basis index holds subsystem q, A being the most significant.
  auto bit = [](int index, int q) { return (index >> (2 - q)) & 1; };
  int out_dim = 1 << n_keep;
  Mat out = Mat::Zero(out_dim, out_dim);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      bool diagonal_on_traced = true;
      int out_r = 0;
      int out_c = 0;
      for (int q = 0; q < 3; ++q) {
        if (kept[q]) {
          out_r = (out_r << 1) | bit(r, q);
          out_c = (out_c << 1) | bit(c, q);
        } else if (bit(r, q) != bit(c, q)) {
          diagonal_on_traced = false;
          break;
        }
      }
      if (diagonal_on_traced) out(out_r, out_c) += rho.entries()(r, c);
    }
  }
  return DensityMatrix(out);
}

MeasurementTriad rotated_pauli_triad(const FrameAngle& frame) {
  frame.validate();
  double ct = std::cos(frame.theta / 2.0);
  double st = std::sin(frame.theta / 2.0);
  cplx ph = std::exp(cplx(0.0, -frame.phi));

  MeasurementTriad triad;
  triad.frame = frame;
  Vec2 zp(ct, ph * st);
  Vec2 zm(st, -ph * ct);
  double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  triad.bases[2] = {zp, zm};
  triad.bases[0] = {Vec2(inv_sqrt2 * (zp + zm)), Vec2(inv_sqrt2 * (zp - zm))};
  triad.bases[1] = {Vec2(inv_sqrt2 * (zp + cplx(0, 1) * zm)),
                    Vec2(inv_sqrt2 * (zp - cplx(0, 1) * zm))};
  return triad;
}

namespace {

StateVector from_entries(std::initializer_list<std::pair<int, cplx>> entries) {
  Vec amp = Vec::Zero(8);
  for (const auto& [idx, value] : entries) amp(idx) = value;
  return StateVector(amp);
}

}  // namespace

StateVector ghz_state() {
  double s = 1.0 / std::sqrt(2.0);
  return from_entries({{0, s}, {7, s}});
}

StateVector w_state() {
  double s = 1.0 / std::sqrt(3.0);
  return from_entries({{1, s}, {2, s}, {4, s}});
}

StateVector generalized_ghz(double alpha) {
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0) {
    throw ValidationError("alpha must lie in [0, 1]");
  }
  return from_entries({{0, alpha}, {7, std::sqrt(1.0 - alpha * alpha)}});
}

StateVector generalized_w(double c1, double c2, double c3) {
  // c1|001> + c2|010> + c3|100>; normalization is checked by the ctor.
  return from_entries({{1, c1}, {2, c2}, {4, c3}});
}

StateVector bell_ab_times_0() {
  double s = 1.0 / std::sqrt(2.0);
  return from_entries({{0, s}, {6, s}});
}

StateVector bell_ac_times_1() {
  double s = 1.0 / std::sqrt(2.0);
  return from_entries({{2, s}, {7, s}});
}

StateVector plus_one_plus() {
  return from_entries({{2, 0.5}, {3, 0.5}, {6, 0.5}, {7, 0.5}});
}

StateVector named_state(const std::string& name) {
  if (name == "ghz") return ghz_state();
  if (name == "w") return w_state();
  if (name == "bell-ab-times-0") return bell_ab_times_0();
  if (name == "bell-ac-times-1") return bell_ac_times_1();
  if (name == "plus-one-plus") return plus_one_plus();
  throw ValidationError("unknown state name: " + name);
}

}  // namespace steerkit
