#pragma once

// Exact state representation for 1-3 qubits: normalized amplitude vectors,
// density matrices, measurement frames and the rotated Pauli triads built
// from them. Qubit order is A (most significant), B, C (least significant).

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace steerkit {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using Vec2 = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kValidationTol = 1e-9;  // input validation
inline constexpr double kInternalTol = 1e-12;   // internal identities

// Thrown for any rejected input; the CLI maps it to exit code 2.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Relative orientation of a party's measurement triad, theta in [0,pi],
// phi in [0,2pi).
struct FrameAngle {
  double theta = 0.0;
  double phi = 0.0;

  void validate() const;

  // Folds arbitrary real angles into the canonical ranges. The fold
  // (theta, phi) -> (2pi - theta, phi + pi) maps a triad onto itself up to
  // outcome relabeling, so every inequality value is preserved exactly.
  static FrameAngle canonical(double theta, double phi);
};

class StateVector {
 public:
  explicit StateVector(Vec amplitudes);

  int dim() const { return static_cast<int>(amp_.size()); }
  int qubits() const { return qubits_; }
  const Vec& amplitudes() const { return amp_; }
  cplx operator[](int i) const { return amp_(i); }

 private:
  Vec amp_;
  int qubits_ = 0;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(Mat entries);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& entries() const { return m_; }

 private:
  Mat m_;
};

enum class Subsystem { A = 0, B = 1, C = 2 };

StateVector tensor_product(const StateVector& a, const StateVector& b);
DensityMatrix density_from_vector(const StateVector& psi);

// Reduction of a three-qubit state to the listed subsystems (kept in A,B,C
// order). keep must be a nonempty proper subset of {A,B,C}.
DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<Subsystem>& keep);

// The three rotated Pauli bases at a common frame. bases[axis][outcome],
// axis order x,y,z; outcome 0 is the + eigenvector.
struct MeasurementTriad {
  FrameAngle frame;
  std::array<std::array<Vec2, 2>, 3> bases;
};

MeasurementTriad rotated_pauli_triad(const FrameAngle& frame);

// Named three-qubit states.
StateVector ghz_state();
StateVector w_state();
StateVector generalized_ghz(double alpha);
StateVector generalized_w(double c1, double c2, double c3);
StateVector bell_ab_times_0();  // (|000> + |110>)/sqrt(2)
StateVector bell_ac_times_1();  // (|010> + |111>)/sqrt(2)
StateVector plus_one_plus();    // (|010> + |011> + |110> + |111>)/2

// Lookup by stable name: ghz, w, bell-ab-times-0, bell-ac-times-1,
// plus-one-plus. Parametrized families go through their constructors.
StateVector named_state(const std::string& name);

}  // namespace steerkit
