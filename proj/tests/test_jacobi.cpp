#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ugscan/jacobi.hpp"

using namespace ugscan;

TEST_CASE("free model has unit couplings and zero potential") {
  auto f = JacobiFamily::free_scalar();
  Eigen::MatrixXd D, V;
  f.eval_fields({0.37, 0.0, 0}, D, V);
  CHECK(D(0, 0) == 1.0);
  CHECK(V(0, 0) == 0.0);
  CHECK(f.l() == 1);
  auto rep = f.validate(f.base().sample(16));
  CHECK(rep.pass);
  CHECK(rep.min_singular_value == doctest::Approx(1.0));
}

TEST_CASE("cosine potential evaluates pointwise") {
  auto f = JacobiFamily::scalar_cosine(BaseSystem::rotation(), 2.0);
  Eigen::MatrixXd D, V;
  f.eval_fields({0.0, 0.0, 0}, D, V);
  CHECK(V(0, 0) == doctest::Approx(2.0));
  f.eval_fields({0.5, 0.0, 0}, D, V);
  CHECK(V(0, 0) == doctest::Approx(-2.0));
  CHECK(f.validate(f.base().sample(32)).pass);
}

TEST_CASE("constant block model carries its matrix potential") {
  Eigen::MatrixXd V0 = Eigen::MatrixXd::Zero(2, 2);
  V0(1, 1) = 5.0;
  auto f = JacobiFamily::constant_block(BaseSystem::rotation(), V0);
  CHECK(f.l() == 2);
  Eigen::MatrixXd D, V;
  f.eval_fields({0.9, 0.0, 0}, D, V);
  CHECK(V(1, 1) == 5.0);
  CHECK(V(0, 1) == 0.0);
  CHECK(D.isIdentity(0.0));
  CHECK(f.validate(f.base().sample(8)).pass);

  CHECK_THROWS_AS(JacobiFamily::constant_block(BaseSystem::rotation(), Eigen::MatrixXd::Zero(2, 3)),
                  ModelError);
}

TEST_CASE("validation flags a nonsymmetric potential") {
  Eigen::MatrixXd V0(2, 2);
  V0 << 0.0, 1.0, 2.0, 0.0;
  auto f = JacobiFamily::constant_block(BaseSystem::rotation(), V0);
  auto rep = f.validate(f.base().sample(4));
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_symmetry_defect == doctest::Approx(1.0));
  CHECK_FALSE(rep.detail.empty());
}

TEST_CASE("matrix trig potential is symmetric by construction") {
  auto f = JacobiFamily::matrix_trig(BaseSystem::rotation(), 2, 1.0, 0.5);
  Eigen::MatrixXd D, V;
  f.eval_fields({0.25, 0.0, 0}, D, V);
  CHECK(V(0, 1) == doctest::Approx(0.5));  // cos(pi/2) contributes nothing
  CHECK(V(1, 0) == V(0, 1));
  CHECK(f.validate(f.base().sample(16)).pass);
}

TEST_CASE("periodic tables are read off the cycle state") {
  std::vector<Eigen::MatrixXd> D{Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)};
  std::vector<Eigen::MatrixXd> V{Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Constant(1, 1, 1.5)};
  auto f = JacobiFamily::periodic_table(D, V);
  CHECK(f.base().period() == 2);
  Eigen::MatrixXd Dp, Vp;
  f.eval_fields({0.0, 0.0, 1}, Dp, Vp);
  CHECK(Vp(0, 0) == 1.5);
  CHECK(f.validate(f.base().sample(1)).pass);

  std::vector<Eigen::MatrixXd> bad{Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(2, 2)};
  CHECK_THROWS_AS(JacobiFamily::periodic_table(bad, V), ModelError);
}

TEST_CASE("validation rejects non-invertible couplings") {
  std::vector<Eigen::MatrixXd> D{Eigen::MatrixXd::Zero(1, 1)};
  std::vector<Eigen::MatrixXd> V{Eigen::MatrixXd::Zero(1, 1)};
  auto f = JacobiFamily::periodic_table(D, V);
  auto rep = f.validate(f.base().sample(1));
  CHECK_FALSE(rep.pass);
  CHECK(rep.min_singular_value == 0.0);
}

TEST_CASE("invertibility threshold is adjustable") {
  std::vector<Eigen::MatrixXd> D{Eigen::MatrixXd::Constant(1, 1, 1e-6)};
  std::vector<Eigen::MatrixXd> V{Eigen::MatrixXd::Zero(1, 1)};
  auto f = JacobiFamily::periodic_table(D, V);
  CHECK(f.validate(f.base().sample(1)).pass);  // 1e-6 > default 1e-8
  f.set_invertibility_threshold(1e-3);
  CHECK_FALSE(f.validate(f.base().sample(1)).pass);
}

TEST_CASE("evaluator output is checked for shape and finiteness") {
  auto bad_shape = JacobiFamily::custom(
      BaseSystem::rotation(), 2,
      [](const BasePoint&, Eigen::MatrixXd& D, Eigen::MatrixXd& V) {
        D = Eigen::MatrixXd::Identity(1, 1);
        V = Eigen::MatrixXd::Zero(1, 1);
      },
      "bad_shape");
  Eigen::MatrixXd D, V;
  CHECK_THROWS_AS(bad_shape.eval_fields({0.0, 0.0, 0}, D, V), ModelError);

  auto bad_value = JacobiFamily::custom(
      BaseSystem::rotation(), 1,
      [](const BasePoint&, Eigen::MatrixXd& Dm, Eigen::MatrixXd& Vm) {
        Dm = Eigen::MatrixXd::Identity(1, 1);
        Vm = Eigen::MatrixXd::Constant(1, 1, std::numeric_limits<double>::quiet_NaN());
      },
      "bad_value");
  CHECK_THROWS_AS(bad_value.eval_fields({0.0, 0.0, 0}, D, V), ModelError);
}
