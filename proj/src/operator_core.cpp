// Block-tridiagonal sections, log-scaled Weyl windows, monodromy spectrum test.
#include "ugscan/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ugscan {

namespace {

constexpr double kRescaleHi = 1e50;
constexpr double kRescaleLo = 1e-50;

double log_sum_exp(const std::vector<double>& t) {
  if (t.empty()) return -std::numeric_limits<double>::infinity();
  const double M = *std::max_element(t.begin(), t.end());
  if (!std::isfinite(M)) return M;
  double s = 0.0;
  for (double v : t) s += std::exp(v - M);
  return M + std::log(s);
}

// recursion solutions kept as e^{s} * w so deep hyperbolic windows never overflow
struct ScaledWindow {
  long lo = 0;
  std::vector<Eigen::VectorXcd> w;
  std::vector<double> s;
  const Eigen::VectorXcd& wat(long n) const { return w[size_t(n - lo)]; }
  double sat(long n) const { return s[size_t(n - lo)]; }
};

ScaledWindow scaled_window(const JacobiFamily& f, const BasePoint& p, cxd z,
                           const Eigen::VectorXcd& u0, const Eigen::VectorXcd& u1, long lo,
                           long hi) {
  const int l = f.l();
  if (u0.size() != l || u1.size() != l) throw ModelError("weyl: seed block size mismatch");
  ScaledWindow win;
  win.lo = lo;
  win.w.assign(size_t(hi - lo + 1), Eigen::VectorXcd::Zero(l));
  win.s.assign(size_t(hi - lo + 1), 0.0);
  auto put = [&](long n, const Eigen::VectorXcd& v, double sc) {
    if (n >= lo && n <= hi) {
      win.w[size_t(n - lo)] = v;
      win.s[size_t(n - lo)] = sc;
    }
  };
  put(0, u0, 0.0);
  put(1, u1, 0.0);

  Eigen::MatrixXd D(l, l), V(l, l), Dprev(l, l);
  auto zmV = [&](const Eigen::MatrixXd& Vn) {
    Eigen::MatrixXcd m = (-Vn).cast<cxd>();
    m.diagonal().array() += z;
    return m;
  };

  // forward: D(T^n) u_{n+1} = (z - V(T^n)) u_n - D(T^{n-1}) u_{n-1}
  {
    Eigen::VectorXcd a = u0, b = u1;
    double sc = 0.0;
    f.eval_fields(p, Dprev, V);
    for (long n = 1; n + 1 <= hi; ++n) {
      f.eval_fields(f.base().advance(p, n), D, V);
      Eigen::VectorXcd c =
          D.cast<cxd>().partialPivLu().solve(zmV(V) * b - Dprev.cast<cxd>() * a);
      const double m = std::max(b.norm(), c.norm());
      if (m > kRescaleHi || (m > 0.0 && m < kRescaleLo)) {
        b /= m;
        c /= m;
        sc += std::log(m);
      }
      put(n + 1, c, sc);
      a = b;
      b = c;
      Dprev = D;
    }
  }
  // backward: D(T^{n-1}) u_{n-1} = (z - V(T^n)) u_n - D(T^n) u_{n+1}
  if (lo < 0) {
    Eigen::VectorXcd b = u0, c = u1;
    double sc = 0.0;
    for (long n = 0; n - 1 >= lo; --n) {
      f.eval_fields(f.base().advance(p, n), D, V);
      Eigen::MatrixXd Dm(l, l), Vm(l, l);
      f.eval_fields(f.base().advance(p, n - 1), Dm, Vm);
      Eigen::VectorXcd a = Dm.cast<cxd>().partialPivLu().solve(zmV(V) * b - D.cast<cxd>() * c);
      const double m = std::max(a.norm(), b.norm());
      if (m > kRescaleHi || (m > 0.0 && m < kRescaleLo)) {
        a /= m;
        b /= m;
        sc += std::log(m);
      }
      put(n - 1, a, sc);
      c = b;
      b = a;
    }
  }
  return win;
}

// log ||u||^2 over sites |n| <= L of the window
double log_window_norm2(const ScaledWindow& win, long L) {
  std::vector<double> terms;
  terms.reserve(size_t(2 * L + 1));
  for (long n = -L; n <= L; ++n) {
    const double nn = win.wat(n).squaredNorm();
    if (nn > 0.0) terms.push_back(2.0 * win.sat(n) + std::log(nn));
  }
  if (terms.empty()) throw std::invalid_argument("weyl: windowed solution vanishes");
  return log_sum_exp(terms);
}

}  // namespace

TruncatedOperator truncate(const JacobiFamily& f, const BasePoint& p, long N) {
  if (N < 1) throw std::invalid_argument("truncate: N must be >= 1");
  const int l = f.l();
  const long B = 2 * N + 1;
  TruncatedOperator t;
  t.center = p;
  t.N = N;
  t.l = l;
  t.matrix = Eigen::MatrixXd::Zero(B * l, B * l);
  Eigen::MatrixXd D(l, l), V(l, l);
  for (long i = 0; i < B; ++i) {
    f.eval_fields(f.base().advance(p, i - N), D, V);
    t.matrix.block(i * l, i * l, l, l) = V;
    if (i + 1 < B) {
      t.matrix.block(i * l, (i + 1) * l, l, l) = D;
      t.matrix.block((i + 1) * l, i * l, l, l) = D.transpose();
    }
  }
  return t;
}

Eigen::VectorXd truncated_spectrum(const TruncatedOperator& t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.matrix, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

VecSeq apply(const JacobiFamily& f, const BasePoint& p, const VecSeq& u) {
  const int l = f.l();
  for (const auto& b : u.entries)
    if (b.size() != l) throw ModelError("apply: block size mismatch");
  VecSeq out;
  if (u.entries.empty()) return out;
  out.lo = u.lo - 1;
  out.entries.assign(u.entries.size() + 2, Eigen::VectorXcd::Zero(l));
  const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(l);
  auto at = [&](long n) -> const Eigen::VectorXcd& {
    return (n < u.lo || n > u.hi()) ? zero : u.entries[size_t(n - u.lo)];
  };
  Eigen::MatrixXd D(l, l), V(l, l), Dprev(l, l);
  f.eval_fields(f.base().advance(p, out.lo - 1), Dprev, V);
  for (long n = out.lo; n <= out.hi(); ++n) {
    f.eval_fields(f.base().advance(p, n), D, V);
    out.entries[size_t(n - out.lo)] =
        Dprev.cast<cxd>() * at(n - 1) + D.cast<cxd>() * at(n + 1) + V.cast<cxd>() * at(n);
    Dprev = D;
  }
  return out;
}

WeylVector weyl_vector(const JacobiFamily& f, const BasePoint& p, cxd z, long L,
                       const Eigen::VectorXcd& u0, const Eigen::VectorXcd& u1) {
  if (L < 0) throw std::invalid_argument("weyl_vector: L must be >= 0");
  if (u0.norm() == 0.0 && u1.norm() == 0.0)
    throw std::invalid_argument("weyl_vector: zero seed vector");
  const auto win = scaled_window(f, p, z, u0, u1, -(L + 1), L + 1);
  const double logU2 = log_window_norm2(win, L);
  WeylVector v;
  v.L = L;
  v.entries.reserve(size_t(2 * L + 1));
  for (long n = -L; n <= L; ++n)
    v.entries.push_back(std::exp(win.sat(n) - 0.5 * logU2) * win.wat(n));
  return v;
}

double weyl_residual(const JacobiFamily& f, const BasePoint& p, cxd z, long L,
                     const Eigen::VectorXcd& u0, const Eigen::VectorXcd& u1) {
  if (L < 0) throw std::invalid_argument("weyl_residual: L must be >= 0");
  if (u0.norm() == 0.0 && u1.norm() == 0.0)
    throw std::invalid_argument("weyl_residual: zero seed vector");
  const int l = f.l();
  const auto win = scaled_window(f, p, z, u0, u1, -(L + 1), L + 1);
  const double logU2 = log_window_norm2(win, L);

  const std::set<long> sites{L - 1, L, L + 1, -(L - 1), -L, -(L + 1)};
  std::vector<double> rterms;
  Eigen::MatrixXd D(l, l), V(l, l), Dm(l, l), Vm(l, l);
  for (long n : sites) {
    f.eval_fields(f.base().advance(p, n), D, V);
    f.eval_fields(f.base().advance(p, n - 1), Dm, Vm);
    Eigen::MatrixXcd Vz = V.cast<cxd>();
    Vz.diagonal().array() -= z;
    const std::pair<Eigen::MatrixXcd, long> parts[3] = {
        {Dm.cast<cxd>(), n - 1}, {Vz, n}, {D.cast<cxd>(), n + 1}};
    double smax = -std::numeric_limits<double>::infinity();
    for (const auto& [M, k] : parts)
      if (std::abs(k) <= L && win.wat(k).squaredNorm() > 0.0) smax = std::max(smax, win.sat(k));
    if (!std::isfinite(smax)) continue;
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(l);
    for (const auto& [M, k] : parts)
      if (std::abs(k) <= L) acc += std::exp(win.sat(k) - smax) * (M * win.wat(k));
    const double nn = acc.squaredNorm();
    if (nn > 0.0) rterms.push_back(2.0 * smax + std::log(nn));
  }
  if (rterms.empty()) return 0.0;
  return std::exp(0.5 * (log_sum_exp(rterms) - logU2));
}

bool periodic_monodromy_oracle(const JacobiFamily& f, cxd z) {
  if (f.base().kind() != BaseKind::periodic_cycle)
    throw std::invalid_argument("periodic_monodromy_oracle: base must be a periodic cycle");
  const int P = f.base().period();
  const int l = f.l();
  BasePoint w;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(2 * l, 2 * l);
  for (int k = 0; k < P; ++k) M = cocycle_matrix(f, z, f.base().advance(w, k)) * M;
  if (l == 1) {
    // quadratic closed form stays exact at band edges where eigensolvers smear
    const cxd t = M.trace();
    const cxd root = std::sqrt(t * t / 4.0 - 1.0);
    for (const cxd mu : {t / 2.0 + root, t / 2.0 - root})
      if (std::abs(std::abs(mu) - 1.0) <= 1e-8) return true;
    return false;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M);
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(std::abs(es.eigenvalues()[i]) - 1.0) <= 1e-8) return true;
  return false;
}

}  // namespace ugscan
