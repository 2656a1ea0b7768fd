// One-step cocycle matrices, raw transfer products, and scale-factored long products.
#pragma once
#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

#include "ugscan/jacobi.hpp"

namespace ugscan {

using cxd = std::complex<double>;

struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// block form [[D^{-1}(z-V), -D^{-1}], [D, 0]] at the base point p, size 2l x 2l, det 1
Eigen::MatrixXcd cocycle_matrix(const JacobiFamily& f, cxd z, const BasePoint& p);
Eigen::MatrixXcd cocycle_inverse(const JacobiFamily& f, cxd z, const BasePoint& p);

// n-step product of cocycle matrices (inverses for n < 0); identity at n = 0;
// throws past the overflow guard, long products belong to stabilized_chain
Eigen::MatrixXcd transfer(const JacobiFamily& f, cxd z, const BasePoint& p, long n);

// product held as U * diag(exp(logs)) * V^H with unit-norm orthogonal columns in U and
// unitary V, so scales never leave log space; columns kept sorted by descending logs
struct FactoredProduct {
  Eigen::MatrixXcd U;
  Eigen::VectorXd logs;
  Eigen::MatrixXcd V;

  void init(int dim);
  // absorb one more left factor and restore the factored form by one-sided rotations
  void apply_left(const Eigen::MatrixXcd& A);
  Eigen::MatrixXcd reconstruct() const;  // throws when exp(logs) leaves double range
};

enum class ChainDirection { forward, backward };

struct ChainCheckpoint {
  long step = 0;
  Eigen::VectorXd log_svals;  // descending
};

struct TransferChain {
  ChainDirection direction = ChainDirection::forward;
  long steps = 0;
  std::vector<ChainCheckpoint> checkpoints;
  FactoredProduct state;
};

// stabilized |n|-factor product A_{+n} or A_{-n} with checkpoints every `stride` factors
TransferChain stabilized_chain(const JacobiFamily& f, cxd z, const BasePoint& p, long n,
                               ChainDirection dir, long stride = 1);

// grows the seed (u_0, u_1) into the solution over sites [lo, hi] via the three-term recursion
std::vector<Eigen::VectorXcd> propagate_solution(const JacobiFamily& f, cxd z, const BasePoint& p,
                                                 const Eigen::VectorXcd& u0,
                                                 const Eigen::VectorXcd& u1, long lo, long hi);

}  // namespace ugscan
