#include <doctest.h>

#include <mgate/oracle.hpp>
#include <mgate/validate.hpp>

using namespace mgate;
using doctest::Approx;

TEST_CASE("dense index bookkeeping round-trips") {
  for (int idx = 0; idx < oracle::kDim; ++idx) {
    const auto [r, np, nt] = oracle::dense_state(idx);
    CHECK(oracle::dense_index(r, np, nt) == idx);
    CHECK(r >= 1);
    CHECK(r <= 5);
    CHECK(np >= 0);
    CHECK(np <= oracle::kCap);
    CHECK(nt >= 0);
    CHECK(nt <= oracle::kCap);
  }
}

TEST_CASE("the embedding is an isometry onto the canonical states") {
  const Matrix e = oracle::embedding();
  REQUIRE(e.rows() == oracle::kDim);
  REQUIRE(e.cols() == BasisSet::dim);
  const Matrix gram = e.adjoint() * e;
  CHECK((gram - Matrix::Identity(BasisSet::dim, BasisSet::dim)).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("dense operators restrict to the canonical builders") {
  const SchemeParams p = validation::asymmetric_params();
  const Matrix e = oracle::embedding();

  const Matrix hd = oracle::dense_hamiltonian(p);
  const Matrix hr = build_hamiltonian(p);
  CHECK((e.adjoint() * hd * e - hr).cwiseAbs().maxCoeff() < 1e-12);
  // the canonical set is dynamically closed: H never couples out of it
  const Matrix proj = e * e.adjoint();
  CHECK(((Matrix::Identity(oracle::kDim, oracle::kDim) - proj) * hd * e)
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  const auto jd = oracle::dense_jump_operators(p);
  const auto jr = build_jump_operators(p);
  REQUIRE(jd.size() == 6);
  REQUIRE(jr.size() == 6);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(jd[k].rate == jr[k].rate);
    CHECK(jd[k].to_level == jr[k].to_level);
    CHECK(jd[k].from_level == jr[k].from_level);
    CHECK((e.adjoint() * jd[k].op * e - jr[k].op).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(((Matrix::Identity(oracle::kDim, oracle::kDim) - proj) * jd[k].op * e)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("reachability closure matches the canonical basis") {
  const SchemeParams full = validation::asymmetric_params();
  const auto closure = oracle::reachability_closure(full);
  REQUIRE(closure.size() == 18);
  const BasisSet& basis = BasisSet::canonical();
  for (int i = 0; i < BasisSet::dim; ++i) {
    CHECK(closure[static_cast<std::size_t>(i)] == basis.state(i));
  }
}

TEST_CASE("reachability closure shrinks with the decay channels") {
  SchemeParams p = validation::asymmetric_params();
  p.gamma = DecayTable::uniform(0.0);
  CHECK(oracle::reachability_closure(p).size() == 12);

  SchemeParams one_cross = validation::asymmetric_params();
  one_cross.gamma = DecayTable::uniform(0.0);
  one_cross.gamma(5, 2) = 1.0;
  CHECK(oracle::reachability_closure(one_cross).size() == 15);

  SchemeParams other_cross = validation::asymmetric_params();
  other_cross.gamma = DecayTable::uniform(0.0);
  other_cross.gamma(1, 4) = 1.0;
  CHECK(oracle::reachability_closure(other_cross).size() == 15);
}

TEST_CASE("dense vacuum state is stationary") {
  const SchemeParams p = validation::transient_params();
  Matrix rho0 = Matrix::Zero(oracle::kDim, oracle::kDim);
  rho0(oracle::dense_index(3, 0, 0), oracle::dense_index(3, 0, 0)) = 1.0;
  const Matrix rho = oracle::dense_propagate(p, rho0, 0.01);
  CHECK((rho - rho0).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("dense evolution never leaves the embedded subspace") {
  const SchemeParams p = validation::asymmetric_params();
  const Matrix e = oracle::embedding();
  const std::array<Complex, 4> half = {0.5, 0.5, 0.5, 0.5};
  const Vector psi = e * initial_state(half);
  const Matrix rho = oracle::dense_propagate(p, Matrix(psi * psi.adjoint()), 0.05);

  const Matrix proj = e * e.adjoint();
  const Matrix outside =
      (Matrix::Identity(oracle::kDim, oracle::kDim) - proj) * rho;
  CHECK(outside.cwiseAbs().maxCoeff() < 1e-9);
  CHECK(rho.trace().real() == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("dense and restricted propagation agree") {
  const SchemeParams p = validation::asymmetric_params();
  const Matrix e = oracle::embedding();
  const Vector psi = validation::balanced_input();
  const double t = 0.02;

  const Matrix restricted = propagate_master(p, Matrix(psi * psi.adjoint()), t);
  const Vector psi_d = e * psi;
  const Matrix dense = oracle::dense_propagate(p, Matrix(psi_d * psi_d.adjoint()), t);
  CHECK((e.adjoint() * dense * e - restricted).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("monte carlo fidelity is exact for a decoupled channel") {
  SchemeParams p = validation::transient_params();
  p.g_probe = 0.0;
  p.g_trigger = 0.0;
  const auto est = oracle::mc_average_fidelity(p, 0.01, PhaseSet{}, 50, 11);
  CHECK(est.value == Approx(1.0).epsilon(1e-10));
  CHECK(est.std_error < 1e-10);
}

TEST_CASE("monte carlo fidelity tracks the closed form") {
  const SchemeParams p = validation::transient_params();
  const double t = 0.25 / validation::transient_gamma_ref();
  SolverOptions ex;
  ex.method = SolveMethod::MatrixExponential;
  const ProcessMap pm = build_process_map(p, t, ex);
  const Matrix rho_ref = propagate_master(
      p, Matrix(validation::balanced_input() * validation::balanced_input().adjoint()),
      t, ex);
  const PhaseSet phases = extract_phases(reduced_field_state(rho_ref));
  const double closed = average_fidelity(pm, phases);

  const auto est = oracle::mc_average_fidelity(p, t, phases, 600, 5150, ex);
  CHECK(std::abs(est.value - closed) < 5.0 * est.std_error + 1e-6);
  CHECK(est.std_error > 0.0);
  CHECK(est.std_error < 0.05);
}

TEST_CASE("dense propagation validates its input") {
  const SchemeParams p = validation::transient_params();
  CHECK_THROWS_AS(oracle::dense_propagate(p, Matrix::Zero(18, 18), 0.1),
                  state_error);
  CHECK_THROWS_AS(
      oracle::mc_average_fidelity(p, 0.1, PhaseSet{}, 1, 1), params_error);
}
