// Cocycle matrices and long products kept in factored log-scale form.
#include "ugscan/cocycle.hpp"

#include <cmath>
#include <string>

namespace ugscan {

namespace {

std::string point_str(const BasePoint& p) {
  return "x=" + std::to_string(p.x) + " y=" + std::to_string(p.y) + " k=" + std::to_string(p.k);
}

}  // namespace

Eigen::MatrixXcd cocycle_matrix(const JacobiFamily& f, cxd z, const BasePoint& p) {
  const int l = f.l();
  Eigen::MatrixXd D, V;
  f.eval_fields(p, D, V);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(D);
  if (!(lu.rcond() > 1e-14))
    throw NumericsError("cocycle_matrix: coupling numerically singular at " + point_str(p));
  const Eigen::MatrixXd Dinv = lu.inverse();

  Eigen::MatrixXcd zmV = (-V).cast<cxd>();
  zmV.diagonal().array() += z;
  Eigen::MatrixXcd A(2 * l, 2 * l);
  A.topLeftCorner(l, l) = Dinv.cast<cxd>() * zmV;
  A.topRightCorner(l, l) = -Dinv.cast<cxd>();
  A.bottomLeftCorner(l, l) = D.cast<cxd>();
  A.bottomRightCorner(l, l).setZero();

  if (!(std::abs(A.determinant() - 1.0) < 1e-8))
    throw NumericsError("cocycle_matrix: determinant drift at " + point_str(p));
  return A;
}

Eigen::MatrixXcd cocycle_inverse(const JacobiFamily& f, cxd z, const BasePoint& p) {
  const Eigen::MatrixXcd B = cocycle_matrix(f, z, p).inverse();
  if (!(std::abs(B.determinant() - 1.0) < 1e-8))
    throw NumericsError("cocycle_inverse: determinant drift at " + point_str(p));
  return B;
}

Eigen::MatrixXcd transfer(const JacobiFamily& f, cxd z, const BasePoint& p, long n) {
  const int d = 2 * f.l();
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(d, d);
  const long m = n < 0 ? -n : n;
  for (long k = 1; k <= m; ++k) {
    const Eigen::MatrixXcd A = n > 0 ? cocycle_matrix(f, z, f.base().advance(p, k - 1))
                                     : cocycle_inverse(f, z, f.base().advance(p, -k));
    P = A * P;
    if (!(P.cwiseAbs().maxCoeff() < 1e100))
      throw NumericsError("transfer: raw product overflow, use stabilized_chain");
  }
  return P;
}

void FactoredProduct::init(int dim) {
  U = Eigen::MatrixXcd::Identity(dim, dim);
  logs = Eigen::VectorXd::Zero(dim);
  V = Eigen::MatrixXcd::Identity(dim, dim);
}

void FactoredProduct::apply_left(const Eigen::MatrixXcd& A) {
  const int d = int(U.rows());
  const Eigen::MatrixXcd C = A * U;
  for (int c = 0; c < d; ++c) {
    const double nn = C.col(c).norm();
    if (!std::isfinite(nn) || !(nn > 0.0))
      throw NumericsError("factored product: column collapsed under new factor");
    U.col(c) = C.col(c) / nn;
    logs[c] += std::log(nn);
  }

  // one-sided Jacobi on the graded columns U*diag(exp(logs)); each rotation J acts on a
  // column pair and accumulates into V, never touching the stored scales except through
  // the new column norms, so arbitrarily large spreads stay exact
  const double tol = 1e-14;
  bool converged = false;
  for (int sweep = 0; sweep < 40 && !converged; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < d - 1; ++i) {
      for (int j = i + 1; j < d; ++j) {
        if (logs[j] > logs[i]) {
          U.col(i).swap(U.col(j));
          V.col(i).swap(V.col(j));
          std::swap(logs[i], logs[j]);
        }
        const cxd g = U.col(i).dot(U.col(j));
        const double ga = std::abs(g);
        if (ga > off) off = ga;
        if (ga <= tol) continue;
        const double r = std::exp(logs[j] - logs[i]);  // <= 1 after the swap
        const double th = 0.5 * std::atan2(2.0 * ga * r, 1.0 - r * r);
        const double c = std::cos(th), s = std::sin(th);
        const double s_over_r = r > 1e-8 ? s / r : ga / std::max(1.0 - r * r, 0.5);
        const cxd ph = g / ga;

        const Eigen::VectorXcd yi = U.col(i), yj = U.col(j);
        const Eigen::VectorXcd wi = c * yi + (s * r) * std::conj(ph) * yj;
        const Eigen::VectorXcd wj = -s_over_r * ph * yi + c * yj;
        const double ni = wi.norm(), nj = wj.norm();
        if (!(ni > 0.0) || !(nj > 0.0))
          throw NumericsError("factored product: rotation degenerated a column");
        U.col(i) = wi / ni;
        U.col(j) = wj / nj;
        logs[i] += std::log(ni);
        logs[j] += std::log(nj);

        const Eigen::VectorXcd vi = V.col(i), vj = V.col(j);
        V.col(i) = c * vi + s * std::conj(ph) * vj;
        V.col(j) = -s * ph * vi + c * vj;
      }
    }
    converged = off <= tol;
  }
  if (!converged) throw NumericsError("factored product: rotation sweeps did not converge");

  for (int i = 0; i < d - 1; ++i) {  // keep descending
    int m = i;
    for (int j = i + 1; j < d; ++j)
      if (logs[j] > logs[m]) m = j;
    if (m != i) {
      U.col(i).swap(U.col(m));
      V.col(i).swap(V.col(m));
      std::swap(logs[i], logs[m]);
    }
  }
}

Eigen::MatrixXcd FactoredProduct::reconstruct() const {
  if (logs.cwiseAbs().maxCoeff() > 690.0)
    throw NumericsError("factored product: scales exceed double range, keep the factored form");
  return U * logs.array().exp().matrix().cast<cxd>().asDiagonal() * V.adjoint();
}

TransferChain stabilized_chain(const JacobiFamily& f, cxd z, const BasePoint& p, long n,
                               ChainDirection dir, long stride) {
  if (n < 1) throw std::invalid_argument("stabilized_chain: n must be >= 1");
  if (stride < 1) throw std::invalid_argument("stabilized_chain: stride must be >= 1");
  TransferChain chain;
  chain.direction = dir;
  chain.steps = n;
  chain.state.init(2 * f.l());
  chain.checkpoints.reserve(size_t(n / stride) + 1);
  for (long k = 1; k <= n; ++k) {
    const BasePoint q = dir == ChainDirection::forward ? f.base().advance(p, k - 1)
                                                       : f.base().advance(p, -k);
    chain.state.apply_left(dir == ChainDirection::forward ? cocycle_matrix(f, z, q)
                                                          : cocycle_inverse(f, z, q));
    if (k % stride == 0 || k == n) chain.checkpoints.push_back({k, chain.state.logs});
  }
  return chain;
}

std::vector<Eigen::VectorXcd> propagate_solution(const JacobiFamily& f, cxd z, const BasePoint& p,
                                                 const Eigen::VectorXcd& u0,
                                                 const Eigen::VectorXcd& u1, long lo, long hi) {
  const int l = f.l();
  if (u0.size() != l || u1.size() != l)
    throw std::invalid_argument("propagate_solution: seed vectors must have size l");
  if (lo > 0 || hi < 1) throw std::invalid_argument("propagate_solution: range must contain {0,1}");

  std::vector<Eigen::VectorXcd> u(size_t(hi - lo + 1));
  auto at = [&](long n) -> Eigen::VectorXcd& { return u[size_t(n - lo)]; };
  at(0) = u0;
  at(1) = u1;

  Eigen::MatrixXd Dn, Vn, Dprev, Vtmp;
  f.eval_fields(p, Dprev, Vtmp);
  for (long n = 1; n < hi; ++n) {
    f.eval_fields(f.base().advance(p, n), Dn, Vn);
    const Eigen::VectorXcd rhs = z * at(n) - Vn.cast<cxd>() * at(n) - Dprev.cast<cxd>() * at(n - 1);
    at(n + 1) = Dn.cast<cxd>().partialPivLu().solve(rhs);
    Dprev = Dn;
  }
  for (long n = 0; n > lo; --n) {
    f.eval_fields(f.base().advance(p, n), Dn, Vn);
    Eigen::MatrixXd Dl;
    f.eval_fields(f.base().advance(p, n - 1), Dl, Vtmp);
    const Eigen::VectorXcd rhs = z * at(n) - Vn.cast<cxd>() * at(n) - Dn.cast<cxd>() * at(n + 1);
    at(n - 1) = Dl.cast<cxd>().partialPivLu().solve(rhs);
  }
  return u;
}

}  // namespace ugscan
