// Wronskians, decaying solution frames, Green function blocks, Herglotz indicators.
#pragma once
#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

#include "ugscan/cocycle.hpp"
#include "ugscan/hyperbolicity.hpp"

namespace ugscan {

// sequence of l x l solution blocks; blocks[i] lives at site lo + i
struct MatSeq {
  long lo = 0;
  std::vector<Eigen::MatrixXcd> blocks;
  long hi() const { return lo + long(blocks.size()) - 1; }
  const Eigen::MatrixXcd& at(long n) const { return blocks[size_t(n - lo)]; }
};

// W(n) = A_{n-1}^t D_{n-1} B_n - A_n^t D_{n-1} B_{n-1}; the bilinear (transposed,
// unconjugated) pairing is the one conserved along solutions at complex energies
Eigen::MatrixXcd wronskian(const JacobiFamily& f, const BasePoint& p, const MatSeq& A,
                           const MatSeq& B, long n);

// max pairwise drift of W over sites [lo, hi]; small only for genuine solution pairs
double constancy_check(const JacobiFamily& f, const BasePoint& p, cxd z, const MatSeq& A,
                       const MatSeq& B, long lo, long hi);

enum class FrameFlavor { plus, minus };

// l columns of solutions decaying toward +infinity (plus) or -infinity (minus),
// anchored so the stacked frame is orthonormal at site 0.  seq holds the anchored
// top blocks F_n; stacked holds the orthonormal 2l x l stacked frames; step holds
// the upper-triangular one-step factors linking consecutive stacked frames
// (minus: A(T^n p) stacked_n = stacked_{n+1} step_n, plus the mirror under A^{-1}).
// Green blocks are assembled from stacked/step, which stay O(1) at any depth; the
// anchored seq values themselves can overflow on very deep strongly hyperbolic
// windows.
struct DecayingFrame {
  FrameFlavor flavor = FrameFlavor::plus;
  cxd z;
  BasePoint basepoint;
  MatSeq seq;
  std::vector<Eigen::MatrixXcd> stacked;  // stacked[i] at site seq.lo + i
  std::vector<Eigen::MatrixXcd> step;     // step[i] links seq.lo + i -> lo + i + 1
  const Eigen::MatrixXcd& at(long n) const { return seq.at(n); }
  const Eigen::MatrixXcd& stacked_at(long n) const { return stacked[size_t(n - seq.lo)]; }
  const Eigen::MatrixXcd& step_at(long n) const { return step[size_t(n - seq.lo)]; }
};

std::pair<DecayingFrame, DecayingFrame> build_decaying_frames(const JacobiFamily& f, cxd z,
                                                              const BasePoint& p, long N);

struct WronskianQ {
  Eigen::MatrixXcd Q;     // wronskian of the frames at site 0
  Eigen::MatrixXcd Qinv;
  double rcond = 0.0;
};

WronskianQ coupling_matrix(const JacobiFamily& f, const DecayingFrame& plus,
                           const DecayingFrame& minus);

// -F-_p Q^{-1} (F+_q)^t for p <= q, -F+_p Q^{-t} (F-_q)^t for p > q.  Evaluated in a
// scale-free form: the coupling pairing is re-read off the orthonormal stacked frames
// at max(p, q) and carried to the other site by contractive triangular transports, so
// the result does not degrade with window depth or with split growth rates.
Eigen::MatrixXcd green_block(const DecayingFrame& plus, const DecayingFrame& minus,
                             const WronskianQ& Q, long p, long q);

struct GreenIdentityResiduals {
  double a = 0.0;  // || F-_n Q^{-1} (F+_n)^t - F+_n Q^{-t} (F-_n)^t ||
  double b = 0.0;  // || F-_{n+1} Q^{-1} (F+_n)^t - F+_{n+1} Q^{-t} (F-_n)^t - D_n^{-1} ||
  double c = 0.0;  // || F-_n Q^{-1} (F+_{n+1})^t - F+_n Q^{-t} (F-_{n+1})^t + D_n^{-1} ||
};

GreenIdentityResiduals verify_green_identities(const JacobiFamily& f, const DecayingFrame& plus,
                                               const DecayingFrame& minus, const WronskianQ& Q,
                                               long n);

struct GreenTable {
  long lo = 0;
  long hi = 0;
  cxd z;
  std::vector<Eigen::MatrixXcd> blocks;  // row-major over (p, q)
  const Eigen::MatrixXcd& at(long p, long q) const {
    return blocks[size_t((p - lo) * (hi - lo + 1) + (q - lo))];
  }
};

GreenTable green_table(const DecayingFrame& plus, const DecayingFrame& minus, const WronskianQ& Q,
                       long lo, long hi);

// max entry error between the frame Green function and the inverse of the truncated
// section, over sites at least interior_margin away from the truncation boundary
double resolvent_check(const JacobiFamily& f, const BasePoint& p, cxd z, long N_frames,
                       long N_truncation, long interior_margin);

struct HerglotzPoint {
  double y = 0.0;
  double value = 0.0;  // Im tr[G(0,0) + G(1,1)] at x + iy
  bool ok = false;
  std::string message;
};

// boundary-value ladder of the imaginary part of the Green trace at x + iy, y descending
std::vector<HerglotzPoint> herglotz_indicator(const JacobiFamily& f, const BasePoint& p, double x,
                                              const std::vector<double>& y_list);

}  // namespace ugscan
