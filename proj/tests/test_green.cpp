#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ugscan/green.hpp"
#include "ugscan/hyperbolicity.hpp"
#include "ugscan/operator_core.hpp"

using namespace ugscan;

namespace {

MatSeq power_seq(double base, long lo, long hi) {
  MatSeq s;
  s.lo = lo;
  for (long n = lo; n <= hi; ++n)
    s.blocks.push_back(Eigen::MatrixXcd::Constant(1, 1, std::pow(base, double(n))));
  return s;
}

MatSeq from_solution(const std::vector<Eigen::VectorXcd>& sol, long lo) {
  MatSeq s;
  s.lo = lo;
  for (const auto& v : sol) {
    Eigen::MatrixXcd b(1, 1);
    b(0, 0) = v(0);
    s.blocks.push_back(b);
  }
  return s;
}

Eigen::VectorXcd scalar_vec(cxd v) {
  Eigen::VectorXcd u(1);
  u(0) = v;
  return u;
}

const double kM3 = (3.0 - std::sqrt(5.0)) / 2.0;  // decaying multiplier at z = 3
const double kM3big = (3.0 + std::sqrt(5.0)) / 2.0;

}  // namespace

// ---------------------------------------------------------------- Wronskians

TEST_CASE("wronskian of the two free eigen-solutions is constant sqrt(5)") {
  const auto f = JacobiFamily::free_scalar();
  const auto A = power_seq(kM3, -3, 3);
  const auto B = power_seq(kM3big, -3, 3);
  for (long n = -2; n <= 3; ++n) {
    const auto W = wronskian(f, BasePoint{}, A, B, n);
    CHECK(std::abs(W(0, 0) - std::sqrt(5.0)) < 1e-10);
  }
  const auto Wself = wronskian(f, BasePoint{}, A, A, 0);
  CHECK(Wself.norm() == 0.0);
  CHECK_THROWS_AS(wronskian(f, BasePoint{}, A, B, -3), std::invalid_argument);
}

TEST_CASE("wronskian drift separates solutions from non-solutions") {
  const auto f = JacobiFamily::free_scalar();
  const BasePoint p{};
  const cxd z(1.7, 0.0);
  auto A = from_solution(propagate_solution(f, z, p, scalar_vec(1.0), scalar_vec(0.3), -101, 101),
                         -101);
  const auto B = from_solution(
      propagate_solution(f, z, p, scalar_vec(0.2), scalar_vec(1.0), -101, 101), -101);
  CHECK(constancy_check(f, p, z, A, B, -100, 100) < 1e-9);
  CHECK(constancy_check(f, p, z, A, A, -100, 100) == 0.0);

  A.blocks[size_t(37 - A.lo)](0, 0) += 1e-3;
  CHECK(constancy_check(f, p, z, A, B, -100, 100) > 1e-4);
}

// ---------------------------------------------------------------- decaying frames

TEST_CASE("free frames decay at the exact multiplier and solve the recursion") {
  const auto f = JacobiFamily::free_scalar();
  const cxd z(3.0, 0.0);
  const auto [plus, minus] = build_decaying_frames(f, z, BasePoint{}, 20);
  CHECK(plus.seq.lo == -20);
  CHECK(plus.seq.hi() == 20);
  for (long n = -19; n <= 19; ++n) {
    const cxd rp = plus.at(n + 1)(0, 0) / plus.at(n)(0, 0);
    const cxd rm = minus.at(n + 1)(0, 0) / minus.at(n)(0, 0);
    CHECK(std::abs(rp - kM3) < 1e-9);
    CHECK(std::abs(rm - kM3big) < 1e-9);
  }
  for (const auto* fr : {&plus, &minus})
    for (long n = -19; n <= 19; ++n) {
      const cxd resid = fr->at(n + 1)(0, 0) + fr->at(n - 1)(0, 0) - z * fr->at(n)(0, 0);
      const double scale = std::abs(fr->at(n)(0, 0)) + std::abs(fr->at(n + 1)(0, 0)) +
                           std::abs(fr->at(n - 1)(0, 0));
      CHECK(std::abs(resid) < 1e-12 * std::max(scale, 1e-30));
    }
}

TEST_CASE("frames are genuine solution pairs with a flat Wronskian") {
  const auto f = JacobiFamily::scalar_cosine(BaseSystem::rotation(), 2.0);
  const BasePoint p{0.3, 0.0, 0};
  const cxd z(6.5, 0.0);
  const auto [plus, minus] = build_decaying_frames(f, z, p, 20);
  CHECK(constancy_check(f, p, z, plus.seq, minus.seq, -19, 19) < 1e-10);
  const auto Q = coupling_matrix(f, plus, minus);
  CHECK(Q.rcond > 1e-6);
}

TEST_CASE("stable frames of a block model are isotropic for the pairing") {
  Eigen::MatrixXd V0 = Eigen::MatrixXd::Zero(2, 2);
  V0(1, 1) = 5.0;
  const auto f = JacobiFamily::constant_block(BaseSystem::rotation(), V0);
  const auto [plus, minus] = build_decaying_frames(f, cxd(9.0, 0.0), BasePoint{}, 15);
  CHECK(wronskian(f, BasePoint{}, plus.seq, plus.seq, 0).norm() < 1e-10);
  CHECK(wronskian(f, BasePoint{}, minus.seq, minus.seq, 0).norm() < 1e-10);
}

TEST_CASE("frame construction refuses elliptic energies") {
  const auto f = JacobiFamily::free_scalar();
  CHECK_THROWS_AS(build_decaying_frames(f, cxd(0.0, 0.0), BasePoint{}, 10), SplittingError);
  CHECK_THROWS_AS(build_decaying_frames(f, cxd(3.0, 0.0), BasePoint{}, 0), std::invalid_argument);
}

// ---------------------------------------------------------------- Green blocks

TEST_CASE("free diagonal Green value and off-diagonal decay at z = 4") {
  const auto f = JacobiFamily::free_scalar();
  const cxd z(4.0, 0.0);
  const auto [plus, minus] = build_decaying_frames(f, z, BasePoint{}, 48);
  const auto Q = coupling_matrix(f, plus, minus);
  const auto G00 = green_block(plus, minus, Q, 0, 0);
  CHECK(std::abs(G00(0, 0) - cxd(-1.0 / std::sqrt(12.0), 0.0)) < 1e-12);

  const double m = 2.0 - std::sqrt(3.0);
  const auto G05 = green_block(plus, minus, Q, 0, 5);
  CHECK(std::abs(G05(0, 0) / G00(0, 0)) == doctest::Approx(std::pow(m, 5)).epsilon(1e-8));

  const auto G03 = green_block(plus, minus, Q, 0, 3);
  const auto G30 = green_block(plus, minus, Q, 3, 0);
  CHECK((G03 - G30.adjoint()).norm() < 1e-14);

  const auto table = green_table(plus, minus, Q, -5, 5);
  CHECK((table.at(0, 3) - G03).norm() == 0.0);
  CHECK((table.at(-4, -4) - green_block(plus, minus, Q, -4, -4)).norm() == 0.0);
}

TEST_CASE("transpose symmetry holds at complex energies") {
  const auto f = JacobiFamily::scalar_cosine(BaseSystem::rotation(), 2.0);
  const BasePoint p{0.7, 0.0, 0};
  const cxd z(1.0, 0.5);
  const auto [plus, minus] = build_decaying_frames(f, z, p, 12);
  const auto Q = coupling_matrix(f, plus, minus);
  const auto G = green_table(plus, minus, Q, -8, 8);
  double worst = 0.0;
  for (long a = -8; a <= 8; ++a)
    for (long b = -8; b <= 8; ++b)
      worst = std::max(worst, (G.at(a, b) - G.at(b, a).transpose()).norm());
  CHECK(worst < 1e-12);
}

TEST_CASE("coupling identities hold at every interior site") {
  const auto f = JacobiFamily::free_scalar();
  const auto [plus, minus] = build_decaying_frames(f, cxd(3.0, 0.0), BasePoint{}, 20);
  const auto Q = coupling_matrix(f, plus, minus);
  const auto r0 = verify_green_identities(f, plus, minus, Q, 0);
  CHECK(r0.a < 1e-10);
  CHECK(r0.b < 1e-10);
  CHECK(r0.c < 1e-10);

  const auto fc = JacobiFamily::scalar_cosine(BaseSystem::rotation(), 2.0);
  const BasePoint p{0.3, 0.0, 0};
  const auto [cp, cm] = build_decaying_frames(fc, cxd(6.5, 0.0), p, 16);
  const auto Qc = coupling_matrix(fc, cp, cm);
  for (long n = -15; n <= 14; ++n) {
    const auto r = verify_green_identities(fc, cp, cm, Qc, n);
    CHECK(r.a < 1e-8);
    CHECK(r.b < 1e-8);
    CHECK(r.c < 1e-8);
  }
}

TEST_CASE("block coupling identity reduces to the negative identity matrix") {
  Eigen::MatrixXd V0 = Eigen::MatrixXd::Zero(2, 2);
  V0(1, 1) = 5.0;
  const auto f = JacobiFamily::constant_block(BaseSystem::rotation(), V0);
  const auto [plus, minus] = build_decaying_frames(f, cxd(9.0, 0.0), BasePoint{}, 10);
  const auto Q = coupling_matrix(f, plus, minus);
  const auto r = verify_green_identities(f, plus, minus, Q, 0);
  CHECK(r.a < 1e-8);
  CHECK(r.b < 1e-8);
  CHECK(r.c < 1e-8);
}

TEST_CASE("green decay slope matches the growth indicator") {
  const auto f = JacobiFamily::free_scalar();
  const cxd z(4.0, 0.0);
  const auto [plus, minus] = build_decaying_frames(f, z, BasePoint{}, 48);
  const auto Q = coupling_matrix(f, plus, minus);
  const double g5 = std::log(green_block(plus, minus, Q, 0, 5).norm());
  const double g40 = std::log(green_block(plus, minus, Q, 0, 40).norm());
  const double slope = (g40 - g5) / 35.0;
  const auto growth = growth_indicator(f, z, f.base().sample(4), 256);
  CHECK(std::abs(slope + std::log(growth.lambda_estimate)) <
        0.05 * std::log(growth.lambda_estimate));
}

// ---------------------------------------------------------------- truncated inverse

TEST_CASE("green blocks match the truncated inverse deep inside") {
  const auto f = JacobiFamily::free_scalar();
  CHECK(resolvent_check(f, BasePoint{}, cxd(4.0, 0.0), 100, 100, 20) < 1e-8);
  CHECK(resolvent_check(f, BasePoint{}, cxd(2.05, 0.0), 100, 100, 80) < 1e-4);

  Eigen::MatrixXd V0 = Eigen::MatrixXd::Zero(2, 2);
  V0(1, 1) = 5.0;
  const auto fb = JacobiFamily::constant_block(BaseSystem::rotation(), V0);
  CHECK(resolvent_check(fb, BasePoint{}, cxd(9.0, 0.0), 100, 100, 20) < 1e-6);
}

TEST_CASE("resolvent comparison rejects eigenvalues of the section and bad margins") {
  // a hopping-dimerized chain binds a zero-energy state at every Dirichlet cut,
  // while z = 0 lies mid-gap, so frames exist but the section is singular
  std::vector<Eigen::MatrixXd> Ds;
  Ds.push_back(Eigen::MatrixXd::Constant(1, 1, 1.0));
  Ds.push_back(Eigen::MatrixXd::Constant(1, 1, 0.3));
  std::vector<Eigen::MatrixXd> Vs(2, Eigen::MatrixXd::Zero(1, 1));
  const auto fd = JacobiFamily::periodic_table(Ds, Vs);
  const auto eig = truncated_spectrum(truncate(fd, BasePoint{}, 10));
  double edge = 1e300;
  for (double e : eig)
    if (std::abs(e) < std::abs(edge)) edge = e;
  REQUIRE(std::abs(edge) < 1e-12);
  CHECK_THROWS_AS(resolvent_check(fd, BasePoint{}, cxd(0.0, 0.0), 20, 10, 2), NumericsError);

  const auto f = JacobiFamily::free_scalar();
  CHECK_THROWS_AS(resolvent_check(f, BasePoint{}, cxd(4.0, 0.0), 10, 100, 20),
                  std::invalid_argument);
  CHECK_THROWS_AS(resolvent_check(f, BasePoint{}, cxd(4.0, 0.0), 100, 10, 20),
                  std::invalid_argument);
}

TEST_CASE("applying the operator to green columns reproduces a delta") {
  const auto f = JacobiFamily::free_scalar();
  const cxd z(4.0, 0.0);
  const auto [plus, minus] = build_decaying_frames(f, z, BasePoint{}, 30);
  const auto Q = coupling_matrix(f, plus, minus);
  const long q = 2;
  VecSeq col;
  col.lo = -30;
  for (long n = -30; n <= 30; ++n)
    col.entries.push_back(green_block(plus, minus, Q, n, q).col(0));
  const auto hcol = apply(f, BasePoint{}, col);
  for (long n = -20; n <= 20; ++n) {
    const cxd got = hcol.entries[size_t(n - hcol.lo)](0) - z * col.entries[size_t(n - col.lo)](0);
    const cxd want = n == q ? cxd(1.0, 0.0) : cxd(0.0, 0.0);
    CHECK(std::abs(got - want) < 1e-8);
  }
}

// ---------------------------------------------------------------- Herglotz ladder

TEST_CASE("herglotz ladder vanishes off the spectrum and saturates inside") {
  const auto f = JacobiFamily::free_scalar();
  const std::vector<double> ys{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  const auto off = herglotz_indicator(f, BasePoint{}, 3.0, ys);
  REQUIRE(off.size() == 5);
  for (size_t i = 0; i < off.size(); ++i) {
    CHECK(off[i].ok);
    if (i > 0) CHECK(off[i].value < off[i - 1].value);
  }
  CHECK(off.back().value < 1e-3);
  CHECK(off.back().value > 0.0);

  const auto inside = herglotz_indicator(f, BasePoint{}, 0.0, ys);
  CHECK(inside.back().ok);
  CHECK(inside.back().value == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("herglotz value is positive at a fixed offset and fails gracefully") {
  const auto f = JacobiFamily::free_scalar();
  for (double x : {-3.0, 0.0, 2.5}) {
    const auto pts = herglotz_indicator(f, BasePoint{}, x, {1.0});
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].ok);
    CHECK(pts[0].value > 0.0);
    CHECK(std::isfinite(pts[0].value));
  }
  const auto partial = herglotz_indicator(f, BasePoint{}, 0.0, {1e-2, 1e-9});
  REQUIRE(partial.size() == 2);
  CHECK(partial[0].ok);
  CHECK(!partial[1].ok);
  CHECK(!partial[1].message.empty());
  CHECK_THROWS_AS(herglotz_indicator(f, BasePoint{}, 0.0, {1e-3, 1e-2}), std::invalid_argument);
}
