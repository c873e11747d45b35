#include <doctest.h>

#include <cmath>
#include <complex>

#include "steerkit/rng.hpp"
#include "steerkit/state.hpp"

using namespace steerkit;

namespace {

Mat2 bloch_state(double x, double y, double z) {
  Mat2 rho;
  rho << 0.5 * (1.0 + z), 0.5 * cplx(x, -y), 0.5 * cplx(x, y), 0.5 * (1.0 - z);
  return rho;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) {
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("quantum-core") {

TEST_CASE("frame angles validate and canonicalize") {
  CHECK_NOTHROW((FrameAngle{0.0, 0.0}.validate()));
  CHECK_NOTHROW((FrameAngle{kPi, 2.0 * kPi - 1e-12}.validate()));
  CHECK_THROWS_AS((FrameAngle{-0.5, 0.0}.validate()), ValidationError);
  CHECK_THROWS_AS((FrameAngle{kPi + 0.5, 0.0}.validate()), ValidationError);
  CHECK_THROWS_AS((FrameAngle{0.0, -1.0}.validate()), ValidationError);
  CHECK_THROWS_AS((FrameAngle{std::nan(""), 0.0}.validate()), ValidationError);

  // Angles already in range are unchanged.
  FrameAngle id = FrameAngle::canonical(1.25, 4.0);
  CHECK(id.theta == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(id.phi == doctest::Approx(4.0).epsilon(1e-15));

  // Out-of-range theta folds back via (theta, phi) -> (2pi - theta, phi + pi).
  FrameAngle folded = FrameAngle::canonical(kPi + 0.3, 0.2);
  CHECK(folded.theta == doctest::Approx(kPi - 0.3).epsilon(1e-12));
  CHECK(folded.phi == doctest::Approx(0.2 + kPi).epsilon(1e-12));

  // phi wraps modulo 2pi.
  FrameAngle wrapped = FrameAngle::canonical(0.5, 2.0 * kPi + 0.7);
  CHECK(wrapped.theta == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(wrapped.phi == doctest::Approx(0.7).epsilon(1e-12));

  // Re-expressing in-range angles through the folded branch lands back on
  // the same frame, and the result always validates.
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    double theta = rng.uniform01() * kPi;
    double phi = rng.uniform01() * 2.0 * kPi;
    FrameAngle back = FrameAngle::canonical(2.0 * kPi - theta, phi + kPi);
    CHECK(back.theta == doctest::Approx(theta).epsilon(1e-12));
    double dphi = std::abs(back.phi - phi);
    dphi = std::min(dphi, 2.0 * kPi - dphi);
    CHECK(dphi < 1e-9);
    CHECK_NOTHROW(back.validate());
  }
}

TEST_CASE("state vector validation") {
  Vec good(2);
  good << 1.0, 0.0;
  CHECK_NOTHROW((void)StateVector(good));

  Vec bad_norm(2);
  bad_norm << 1.0, 0.5;
  CHECK_THROWS_AS((void)StateVector(bad_norm), ValidationError);

  Vec bad_dim(3);
  bad_dim << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS((void)StateVector(bad_dim), ValidationError);

  Vec bad_value(2);
  bad_value << std::nan(""), 0.0;
  CHECK_THROWS_AS((void)StateVector(bad_value), ValidationError);
}

TEST_CASE("density matrix validation") {
  DensityMatrix rho = density_from_vector(ghz_state());
  CHECK(rho.dim() == 8);
  CHECK(std::abs(rho.entries().trace().real() - 1.0) < 1e-12);

  Mat not_hermitian = Mat::Zero(2, 2);
  not_hermitian(0, 1) = cplx(0.3, 0.0);
  not_hermitian(0, 0) = 0.7;
  not_hermitian(1, 1) = 0.3;
  CHECK_THROWS_AS((void)DensityMatrix(not_hermitian), ValidationError);

  Mat bad_trace = Mat::Identity(2, 2);
  CHECK_THROWS_AS((void)DensityMatrix(bad_trace), ValidationError);

  Mat negative = Mat::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK_THROWS_AS((void)DensityMatrix(negative), ValidationError);
}

TEST_CASE("named states have the expected amplitudes") {
  const double s2 = 1.0 / std::sqrt(2.0);
  const double s3 = 1.0 / std::sqrt(3.0);

  StateVector ghz = ghz_state();
  CHECK(std::abs(ghz.amplitudes()(0) - cplx(s2, 0)) < 1e-15);
  CHECK(std::abs(ghz.amplitudes()(7) - cplx(s2, 0)) < 1e-15);

  StateVector w = w_state();
  CHECK(std::abs(w.amplitudes()(1) - cplx(s3, 0)) < 1e-15);
  CHECK(std::abs(w.amplitudes()(2) - cplx(s3, 0)) < 1e-15);
  CHECK(std::abs(w.amplitudes()(4) - cplx(s3, 0)) < 1e-15);

  StateVector bell0 = bell_ab_times_0();
  CHECK(std::abs(bell0.amplitudes()(0) - cplx(s2, 0)) < 1e-15);
  CHECK(std::abs(bell0.amplitudes()(6) - cplx(s2, 0)) < 1e-15);

  StateVector bell1 = bell_ac_times_1();
  CHECK(std::abs(bell1.amplitudes()(2) - cplx(s2, 0)) < 1e-15);
  CHECK(std::abs(bell1.amplitudes()(7) - cplx(s2, 0)) < 1e-15);

  StateVector pop = plus_one_plus();
  for (int idx : {2, 3, 6, 7}) {
    CHECK(std::abs(pop.amplitudes()(idx) - cplx(0.5, 0)) < 1e-15);
  }

  CHECK_THROWS_AS(named_state("nonesuch"), ValidationError);
  CHECK(named_state("w").amplitudes().isApprox(w.amplitudes()));
}

TEST_CASE("generalized families") {
  StateVector edge0 = generalized_ghz(0.0);
  CHECK(std::abs(edge0.amplitudes()(7) - cplx(1, 0)) < 1e-15);
  StateVector edge1 = generalized_ghz(1.0);
  CHECK(std::abs(edge1.amplitudes()(0) - cplx(1, 0)) < 1e-15);
  CHECK_THROWS_AS(generalized_ghz(1.2), ValidationError);
  CHECK_THROWS_AS(generalized_ghz(-0.1), ValidationError);

  StateVector gw = generalized_w(0.2, std::sqrt(0.6), 0.6);
  CHECK(std::abs(gw.amplitudes()(1) - cplx(0.2, 0)) < 1e-15);
  CHECK(std::abs(gw.amplitudes()(2) - cplx(std::sqrt(0.6), 0)) < 1e-15);
  CHECK(std::abs(gw.amplitudes()(4) - cplx(0.6, 0)) < 1e-15);
  CHECK_THROWS_AS(generalized_w(1.0, 1.0, 1.0), ValidationError);
}

TEST_CASE("tensor product and partial trace round trips") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    // Random pure single-qubit factors.
    auto random_qubit = [&rng]() {
      Vec v(2);
      v << cplx(rng.uniform01() - 0.5, rng.uniform01() - 0.5),
          cplx(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
      v.normalize();
      return v;
    };
    Vec a = random_qubit();
    Vec b = random_qubit();
    Vec c = random_qubit();

    Mat rho_a = a * a.adjoint();
    Mat rho_b = b * b.adjoint();
    Mat rho_c = c * c.adjoint();
    DensityMatrix full(kron(kron(rho_a, rho_b), rho_c));

    Mat back_a = partial_trace(full, {Subsystem::A}).entries();
    Mat back_bc = partial_trace(full, {Subsystem::B, Subsystem::C}).entries();
    CHECK((back_a - rho_a).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((back_bc - kron(rho_b, rho_c)).cwiseAbs().maxCoeff() < 1e-12);

    // Two-step reduction agrees with the direct one: trace A out of the
    // AB reduction by summing the diagonal blocks (A is the high bit).
    Mat ab = partial_trace(full, {Subsystem::A, Subsystem::B}).entries();
    Mat two_step = ab.block(0, 0, 2, 2) + ab.block(2, 2, 2, 2);
    Mat one_shot = partial_trace(full, {Subsystem::B}).entries();
    CHECK((two_step - one_shot).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("partial trace of named states") {
  DensityMatrix ghz = density_from_vector(ghz_state());
  Mat ab = partial_trace(ghz, {Subsystem::A, Subsystem::B}).entries();
  Mat expected = Mat::Zero(4, 4);
  expected(0, 0) = 0.5;
  expected(3, 3) = 0.5;
  CHECK((ab - expected).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(partial_trace(ghz, {}), ValidationError);
  CHECK_THROWS_AS(
      partial_trace(ghz, {Subsystem::A, Subsystem::B, Subsystem::C}),
      ValidationError);
  DensityMatrix small(Mat::Identity(2, 2) * 0.5);
  CHECK_THROWS_AS(partial_trace(small, {Subsystem::A}), ValidationError);
}

TEST_CASE("canonical triad matches the Pauli bases") {
  MeasurementTriad triad = rotated_pauli_triad(FrameAngle{0.0, 0.0});
  const double s2 = 1.0 / std::sqrt(2.0);

  // z basis: computational.
  CHECK(std::abs(triad.bases[2][0](0) - cplx(1, 0)) < 1e-12);
  CHECK(std::abs(triad.bases[2][1](1) + cplx(1, 0)) < 1e-12);

  // x basis spans {|+>, |->}; which outcome carries which sign is a
  // convention, so compare the projector pair as a set.
  Mat2 plus = bloch_state(1, 0, 0);
  Mat2 minus = bloch_state(-1, 0, 0);
  Mat2 px0 = triad.bases[0][0] * triad.bases[0][0].adjoint();
  Mat2 px1 = triad.bases[0][1] * triad.bases[0][1].adjoint();
  bool x_direct = (px0 - plus).cwiseAbs().maxCoeff() < 1e-12 &&
                  (px1 - minus).cwiseAbs().maxCoeff() < 1e-12;
  bool x_swapped = (px0 - minus).cwiseAbs().maxCoeff() < 1e-12 &&
                   (px1 - plus).cwiseAbs().maxCoeff() < 1e-12;
  CHECK((x_direct || x_swapped));

  Mat2 yplus = bloch_state(0, 1, 0);
  Mat2 yminus = bloch_state(0, -1, 0);
  Mat2 py0 = triad.bases[1][0] * triad.bases[1][0].adjoint();
  Mat2 py1 = triad.bases[1][1] * triad.bases[1][1].adjoint();
  bool y_direct = (py0 - yplus).cwiseAbs().maxCoeff() < 1e-12 &&
                  (py1 - yminus).cwiseAbs().maxCoeff() < 1e-12;
  bool y_swapped = (py0 - yminus).cwiseAbs().maxCoeff() < 1e-12 &&
                   (py1 - yplus).cwiseAbs().maxCoeff() < 1e-12;
  CHECK((y_direct || y_swapped));

  CHECK(s2 == doctest::Approx(std::abs(triad.bases[0][0](0))).epsilon(1e-12));
}

TEST_CASE("rotated triads are orthonormal and mutually unbiased") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    FrameAngle frame{rng.uniform01() * kPi, rng.uniform01() * 2.0 * kPi};
    MeasurementTriad triad = rotated_pauli_triad(frame);
    for (int axis = 0; axis < 3; ++axis) {
      CHECK(std::abs(triad.bases[axis][0].norm() - 1.0) < 1e-9);
      CHECK(std::abs(triad.bases[axis][1].norm() - 1.0) < 1e-9);
      CHECK(std::abs(triad.bases[axis][0].dot(triad.bases[axis][1])) < 1e-9);
    }
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        for (int u = 0; u < 2; ++u) {
          for (int v = 0; v < 2; ++v) {
            double overlap =
                std::norm(triad.bases[a][u].dot(triad.bases[b][v]));
            CHECK(std::abs(overlap - 0.5) < 1e-9);
          }
        }
      }
    }
  }
}

TEST_CASE("frame (pi/2, 0) maps the rotated z axis onto physical x") {
  MeasurementTriad triad = rotated_pauli_triad(FrameAngle{kPi / 2.0, 0.0});
  Mat2 proj = triad.bases[2][0] * triad.bases[2][0].adjoint();
  CHECK((proj - bloch_state(1, 0, 0)).cwiseAbs().maxCoeff() < 1e-12);
  // And the rotated x axis lands on physical -z for this frame.
  Mat2 projx = triad.bases[0][0] * triad.bases[0][0].adjoint();
  double z_component = (projx(0, 0) - projx(1, 1)).real();
  CHECK(std::abs(std::abs(z_component) - 1.0) < 1e-12);
}

}  // TEST_SUITE
