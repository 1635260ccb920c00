#include <doctest.h>

#include <mgate/dynamics.hpp>
#include <mgate/fields.hpp>
#include <mgate/validate.hpp>

using namespace mgate;
using doctest::Approx;

namespace {

Matrix pure(const Vector& psi) { return psi * psi.adjoint(); }

}  // namespace

TEST_CASE("density matrix contract") {
  const Vector psi = validation::balanced_input();
  CHECK_NOTHROW(check_density_matrix(pure(psi)));

  Matrix bad = pure(psi);
  bad(0, 1) += Complex(0.0, 1e-3);
  CHECK_THROWS_AS(check_density_matrix(bad), state_error);

  CHECK_THROWS_AS(check_density_matrix(Matrix(2.0 * pure(psi))), state_error);

  Matrix neg = Matrix::Zero(3, 3);
  neg(0, 0) = 1.2;
  neg(1, 1) = -0.2;
  CHECK_THROWS_AS(check_density_matrix(neg), state_error);

  CHECK_THROWS_AS(check_density_matrix(Matrix::Zero(2, 3)), state_error);
}

TEST_CASE("time grid validation and uniform grids") {
  CHECK_NOTHROW(validate_time_grid({0.0}));
  CHECK_NOTHROW(validate_time_grid({0.0, 0.5, 1.0}));
  CHECK_THROWS_AS(validate_time_grid({}), params_error);
  CHECK_THROWS_AS(validate_time_grid({0.1, 0.2}), params_error);
  CHECK_THROWS_AS(validate_time_grid({0.0, 0.2, 0.2}), params_error);

  const auto g = uniform_grid(2.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 2.0);
  CHECK(g[2] == Approx(1.0));
  CHECK_THROWS_AS(uniform_grid(0.0, 5), params_error);
  CHECK_THROWS_AS(uniform_grid(1.0, 1), params_error);
}

TEST_CASE("the vacuum state does not evolve") {
  const SchemeParams p = validation::transient_params();
  Vector psi = Vector::Zero(BasisSet::dim);
  psi(BasisSet::canonical().index(BasisState{3, 0, 0})) = 1.0;
  const Matrix rho = propagate_master(p, pure(psi), 0.02);
  CHECK((rho - pure(psi)).cwiseAbs().maxCoeff() < 1e-10);

  const auto [psi_nj, surv] = propagate_nojump(p, psi, 0.02);
  CHECK((psi_nj - psi).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(surv == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("t = 0 and single-sample grids return the initial state") {
  const SchemeParams p = validation::transient_params();
  const Vector psi = validation::balanced_input();
  const Matrix rho = propagate_master(p, pure(psi), 0.0);
  CHECK((rho - pure(psi)).cwiseAbs().maxCoeff() == 0.0);

  const Trajectory traj = sample_trajectory(p, psi, {0.0});
  REQUIRE(traj.states.size() == 1);
  CHECK((traj.states[0] - pure(psi)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unitary evolution keeps purity and survival at one") {
  const SchemeParams p = validation::unitary_params();
  const Vector psi = validation::balanced_input();
  const double t = 0.2 / validation::transient_gamma_ref();
  const Matrix rho = propagate_master(p, pure(psi), t);
  CHECK((rho * rho).trace().real() == Approx(1.0).epsilon(1e-7));

  const auto [psi_nj, surv] = propagate_nojump(p, psi, t);
  CHECK(surv == Approx(1.0).epsilon(1e-7));
}

TEST_CASE("negative or non-finite times are rejected") {
  const SchemeParams p = validation::transient_params();
  const Vector psi = validation::balanced_input();
  CHECK_THROWS_AS(propagate_master(p, pure(psi), -1.0), params_error);
  CHECK_THROWS_AS(propagate_nojump(p, psi, std::nan("")), params_error);
}

TEST_CASE("trajectory sampling matches point propagation") {
  const SchemeParams p = validation::asymmetric_params();
  const Vector psi = validation::balanced_input();
  const std::vector<double> grid = {0.0, 0.013, 0.04, 0.09};
  const Trajectory traj = sample_trajectory(p, psi, grid);
  REQUIRE(traj.states.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Matrix direct = propagate_master(p, pure(psi), grid[i]);
    CHECK((traj.states[i] - direct).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("nojump trajectory survival equals point propagation") {
  const SchemeParams p = validation::asymmetric_params();
  const Vector psi = validation::balanced_input();
  const auto grid = uniform_grid(0.08, 5);
  const NojumpTrajectory nj = sample_trajectory_nojump(p, psi, grid);
  REQUIRE(nj.survival.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto [psi_i, surv] = propagate_nojump(p, psi, grid[i]);
    CHECK((nj.states[i] - psi_i).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(nj.survival[i] == Approx(surv).epsilon(1e-7));
  }
}

TEST_CASE("mode dispatch produces conditioned density matrices") {
  const SchemeParams p = validation::transient_params();
  const Vector psi = validation::balanced_input();
  const auto grid = uniform_grid(0.01, 3);
  const Trajectory nj = sample_trajectory(p, psi, grid, EvolutionMode::NoJump);
  const Trajectory master = sample_trajectory(p, psi, grid, EvolutionMode::Master);
  REQUIRE(nj.states.size() == 3);
  // conditioned states have trace = survival <= 1, master states trace 1
  CHECK(nj.states[2].trace().real() < 1.0);
  CHECK(master.states[2].trace().real() == Approx(1.0).epsilon(1e-8));
  CHECK(nj.states[2].trace().real() ==
        Approx(propagate_nojump(p, psi, grid[2]).second).epsilon(1e-7));
}

TEST_CASE("uniform-grid exponential stepping matches the adaptive engine") {
  const SchemeParams p = validation::transient_params();
  const Vector psi = validation::balanced_input();
  const auto grid = uniform_grid(0.25 / validation::transient_gamma_ref(), 6);
  SolverOptions ex;
  ex.method = SolveMethod::MatrixExponential;
  const Trajectory a = sample_trajectory(p, psi, grid);
  const Trajectory b = sample_trajectory(p, psi, grid, ex);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK((a.states[i] - b.states[i]).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("level populations and field reduction on elementary states") {
  const BasisSet& basis = BasisSet::canonical();

  Vector v11 = Vector::Zero(BasisSet::dim);
  v11(basis.index(BasisState{3, 1, 1})) = 1.0;
  const FieldState f11 = reduced_field_state(pure(v11));
  CHECK(std::abs(f11.block(3, 3) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(f11.block.cwiseAbs().sum() == Approx(1.0));
  CHECK(f11.leakage == Approx(0.0));

  Vector v201 = Vector::Zero(BasisSet::dim);
  v201(basis.index(BasisState{2, 0, 1})) = 1.0;
  const FieldState f201 = reduced_field_state(pure(v201));
  CHECK(f201.block.cwiseAbs().maxCoeff() == Approx(0.0));
  CHECK(f201.leakage == Approx(1.0));

  Vector v302 = Vector::Zero(BasisSet::dim);
  v302(basis.index(BasisState{3, 0, 2})) = 1.0;
  const FieldState f302 = reduced_field_state(pure(v302));
  CHECK(f302.block.cwiseAbs().maxCoeff() == Approx(0.0));
  CHECK(f302.leakage == Approx(1.0));

  const auto pops = level_populations(pure(v201));
  CHECK(pops[1] == Approx(1.0));  // level 2 population
  CHECK(pops[0] + pops[2] + pops[3] + pops[4] == Approx(0.0));
}
