// Finite sections of the operator, Weyl vectors and residuals, periodic Floquet oracle.
#pragma once
#include <Eigen/Dense>

#include <vector>

#include "ugscan/cocycle.hpp"

namespace ugscan {

struct TruncatedOperator {
  BasePoint center;
  long N = 0;  // half-width, sites -N..N
  int l = 1;
  Eigen::MatrixXd matrix;  // (2N+1)l square, block tridiagonal, Dirichlet cutoff
};

TruncatedOperator truncate(const JacobiFamily& f, const BasePoint& p, long N);

// all eigenvalues of the symmetric section, ascending
Eigen::VectorXd truncated_spectrum(const TruncatedOperator& t);

// finitely supported sequence of l-blocks; entries[i] lives at site lo + i
struct VecSeq {
  long lo = 0;
  std::vector<Eigen::VectorXcd> entries;
  long hi() const { return lo + long(entries.size()) - 1; }
};

// termwise application of the operator; support grows by one site each side
VecSeq apply(const JacobiFamily& f, const BasePoint& p, const VecSeq& u);

// unit vector supported on [-L, L] obtained by windowing the solution seeded at sites 0, 1
struct WeylVector {
  long L = 0;
  std::vector<Eigen::VectorXcd> entries;  // sites -L..L
  const Eigen::VectorXcd& at(long n) const { return entries[size_t(n + L)]; }
};

WeylVector weyl_vector(const JacobiFamily& f, const BasePoint& p, cxd z, long L,
                       const Eigen::VectorXcd& u0, const Eigen::VectorXcd& u1);

// ||(H - z) u^(L)|| / ||u^(L)|| for the windowed solution; only the six boundary
// sites n = +-(L-1), +-L, +-(L+1) can contribute, everything is kept in log scale
double weyl_residual(const JacobiFamily& f, const BasePoint& p, cxd z, long L,
                     const Eigen::VectorXcd& u0, const Eigen::VectorXcd& u1);

// Floquet test over one period: some monodromy eigenvalue sits on the unit circle
bool periodic_monodromy_oracle(const JacobiFamily& f, cxd z);

}  // namespace ugscan
