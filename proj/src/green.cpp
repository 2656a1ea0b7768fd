// Anchored two-pass frame construction and the Green function algebra built on it.
#include "ugscan/green.hpp"

#include <algorithm>
#include <cmath>

#include "ugscan/operator_core.hpp"

namespace ugscan {

namespace {

constexpr double kFrameOverflow = 1e280;

Eigen::MatrixXcd orthonormal_columns(const Eigen::MatrixXcd& X) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(X);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(X.rows(), X.cols());
}

// thin QR with the triangular factor's diagonal rotated real positive
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> thin_qr_signed(const Eigen::MatrixXcd& X) {
  const long k = X.cols();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(X);
  Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(X.rows(), k);
  Eigen::MatrixXcd R =
      qr.matrixQR().topRows(k).triangularView<Eigen::Upper>().toDenseMatrix();
  for (long i = 0; i < k; ++i) {
    const double a = std::abs(R(i, i));
    if (a < 1e-300) throw NumericsError("frame propagation lost rank");
    const cxd ph = R(i, i) / a;
    R.row(i) *= std::conj(ph);
    Q.col(i) *= ph;
  }
  return {Q, R};
}

// stable (forward chain) or unstable (backward chain) frame, deepening the chain
// until the singular-value split is unambiguous
Eigen::MatrixXcd anchor_frame(const JacobiFamily& f, cxd z, const BasePoint& q,
                              ChainDirection dir) {
  const int l = f.l();
  long depth = 256;
  for (;;) {
    const auto ch = stabilized_chain(f, z, q, depth, dir, depth);
    const double gap = ch.state.logs[l - 1] - ch.state.logs[l];
    if (gap >= 16.0) return orthonormal_columns(ch.state.V.rightCols(l));
    if (depth >= 16384)
      throw SplittingError("decaying frames: split gap " + std::to_string(gap) +
                               " still ambiguous at depth " + std::to_string(depth),
                           gap);
    depth *= 4;
  }
}

void guard_frame_scale(const Eigen::MatrixXcd& M) {
  if (!M.allFinite() || M.cwiseAbs().maxCoeff() > kFrameOverflow)
    throw NumericsError("decaying frames: window too deep for this growth rate");
}

void check_site(const DecayingFrame& fr, long n, const char* who) {
  if (n < fr.seq.lo || n > fr.seq.hi())
    throw std::invalid_argument(std::string(who) + ": site outside the frame window");
}

// bilinear pairing of the orthonormal stacked frames at one site; the anchored
// coupling matrix factors as (M+_n)^t P(n) M-_n at every n, so P(n) is invertible
// exactly where the coupling is
Eigen::MatrixXcd local_pairing(const DecayingFrame& plus, const DecayingFrame& minus, long n) {
  const long l = plus.stacked_at(n).cols();
  const Eigen::MatrixXcd& P = plus.stacked_at(n);
  const Eigen::MatrixXcd& M = minus.stacked_at(n);
  return P.bottomRows(l).transpose() * M.topRows(l) -
         P.topRows(l).transpose() * M.bottomRows(l);
}

Eigen::MatrixXcd pairing_inverse(const DecayingFrame& plus, const DecayingFrame& minus, long n) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(local_pairing(plus, minus, n));
  if (!(lu.rcond() > 1e-12))
    throw NumericsError("frame pairing degenerate at site " + std::to_string(n));
  return lu.inverse();
}

// F-_i Q^{-1} (F+_j)^t, assembled from the orthonormal frames and the one-step
// factors so every transport is contractive whenever i <= j
Eigen::MatrixXcd cross_minus_plus(const DecayingFrame& plus, const DecayingFrame& minus, long i,
                                  long j) {
  const long l = plus.stacked_at(j).cols();
  Eigen::MatrixXcd X =
      pairing_inverse(plus, minus, j) * plus.stacked_at(j).topRows(l).transpose();
  for (long n = j - 1; n >= i; --n)
    X = minus.step_at(n).triangularView<Eigen::Upper>().solve(X);
  for (long n = j; n <= i - 1; ++n) X = minus.step_at(n) * X;
  return minus.stacked_at(i).topRows(l) * X;
}

// F+_i Q^{-t} (F-_j)^t, the mirror assembly, contractive whenever i >= j
Eigen::MatrixXcd cross_plus_minus(const DecayingFrame& plus, const DecayingFrame& minus, long i,
                                  long j) {
  const long l = plus.stacked_at(j).cols();
  Eigen::MatrixXcd Z = minus.stacked_at(j).topRows(l).transpose();
  for (long n = j; n <= i - 1; ++n)
    Z = minus.step_at(n).transpose().triangularView<Eigen::Lower>().solve(Z);
  for (long n = j - 1; n >= i; --n) Z = minus.step_at(n).transpose() * Z;
  return plus.stacked_at(i).topRows(l) *
         (pairing_inverse(plus, minus, i).transpose() * Z);
}

}  // namespace

Eigen::MatrixXcd wronskian(const JacobiFamily& f, const BasePoint& p, const MatSeq& A,
                           const MatSeq& B, long n) {
  if (n - 1 < A.lo || n > A.hi() || n - 1 < B.lo || n > B.hi())
    throw std::invalid_argument("wronskian: sequences must cover sites n-1 and n");
  const int l = f.l();
  Eigen::MatrixXd D(l, l), V(l, l);
  f.eval_fields(f.base().advance(p, n - 1), D, V);
  const Eigen::MatrixXcd Dc = D.cast<cxd>();
  return A.at(n - 1).transpose() * Dc * B.at(n) - A.at(n).transpose() * Dc * B.at(n - 1);
}

double constancy_check(const JacobiFamily& f, const BasePoint& p, cxd z, const MatSeq& A,
                       const MatSeq& B, long lo, long hi) {
  (void)z;  // the pairing itself does not involve z; it tags the solutions' energy
  if (hi <= lo) throw std::invalid_argument("constancy_check: empty window");
  std::vector<Eigen::MatrixXcd> W;
  for (long n = lo + 1; n <= hi; ++n) W.push_back(wronskian(f, p, A, B, n));
  double drift = 0.0;
  for (size_t i = 0; i < W.size(); ++i)
    for (size_t j = i + 1; j < W.size(); ++j) drift = std::max(drift, (W[i] - W[j]).norm());
  return drift;
}

std::pair<DecayingFrame, DecayingFrame> build_decaying_frames(const JacobiFamily& f, cxd z,
                                                              const BasePoint& p, long N) {
  if (N < 1) throw std::invalid_argument("build_decaying_frames: N must be >= 1");
  const int l = f.l();
  const long buffer = 8;
  const long lo = -N, hi = N;

  // plus flavor: pull the stable frame back from beyond the +N edge, QR at every
  // site, then anchor the mixing factor at site 0 where magnitudes are O(1)
  DecayingFrame plus{FrameFlavor::plus, z, p, {lo, {}}, {}, {}};
  {
    const long a = hi + buffer;
    std::vector<Eigen::MatrixXcd> W(size_t(a - lo + 1));
    std::vector<Eigen::MatrixXcd> S(size_t(a - lo));
    W.back() = anchor_frame(f, z, f.base().advance(p, a), ChainDirection::forward);
    for (long n = a - 1; n >= lo; --n) {
      const Eigen::MatrixXcd X =
          cocycle_inverse(f, z, f.base().advance(p, n)) * W[size_t(n + 1 - lo)];
      auto [Qn, Rn] = thin_qr_signed(X);
      W[size_t(n - lo)] = Qn;
      S[size_t(n - lo)] = Rn;
    }
    std::vector<Eigen::MatrixXcd> M(size_t(hi - lo + 1));
    M[size_t(-lo)] = Eigen::MatrixXcd::Identity(l, l);
    for (long n = 0; n + 1 <= hi; ++n)
      M[size_t(n + 1 - lo)] = S[size_t(n - lo)]
                                  .triangularView<Eigen::Upper>()
                                  .solve(M[size_t(n - lo)]);
    for (long n = -1; n >= lo; --n) {
      M[size_t(n - lo)] = S[size_t(n - lo)] * M[size_t(n + 1 - lo)];
      guard_frame_scale(M[size_t(n - lo)]);
    }
    plus.seq.blocks.resize(size_t(hi - lo + 1));
    for (long n = lo; n <= hi; ++n)
      plus.seq.blocks[size_t(n - lo)] = W[size_t(n - lo)].topRows(l) * M[size_t(n - lo)];
    plus.stacked.assign(W.begin(), W.begin() + (hi - lo + 1));
    plus.step.assign(S.begin(), S.begin() + (hi - lo));
  }

  // minus flavor: push the unstable frame forward from beyond the -N edge
  DecayingFrame minus{FrameFlavor::minus, z, p, {lo, {}}, {}, {}};
  {
    const long b = lo - buffer;
    std::vector<Eigen::MatrixXcd> W(size_t(hi - b + 1));
    std::vector<Eigen::MatrixXcd> S(size_t(hi - b));
    W.front() = anchor_frame(f, z, f.base().advance(p, b), ChainDirection::backward);
    for (long n = b; n + 1 <= hi; ++n) {
      const Eigen::MatrixXcd X = cocycle_matrix(f, z, f.base().advance(p, n)) * W[size_t(n - b)];
      auto [Qn, Rn] = thin_qr_signed(X);
      W[size_t(n + 1 - b)] = Qn;
      S[size_t(n - b)] = Rn;
    }
    std::vector<Eigen::MatrixXcd> M(size_t(hi - lo + 1));
    M[size_t(-lo)] = Eigen::MatrixXcd::Identity(l, l);
    for (long n = 0; n + 1 <= hi; ++n) {
      M[size_t(n + 1 - lo)] = S[size_t(n - b)] * M[size_t(n - lo)];
      guard_frame_scale(M[size_t(n + 1 - lo)]);
    }
    for (long n = -1; n >= lo; --n)
      M[size_t(n - lo)] = S[size_t(n - b)]
                              .triangularView<Eigen::Upper>()
                              .solve(M[size_t(n + 1 - lo)]);
    minus.seq.blocks.resize(size_t(hi - lo + 1));
    for (long n = lo; n <= hi; ++n)
      minus.seq.blocks[size_t(n - lo)] = W[size_t(n - b)].topRows(l) * M[size_t(n - lo)];
    minus.stacked.assign(W.begin() + (lo - b), W.begin() + (hi - b + 1));
    minus.step.assign(S.begin() + (lo - b), S.begin() + (lo - b) + (hi - lo));
  }

  return {plus, minus};
}

WronskianQ coupling_matrix(const JacobiFamily& f, const DecayingFrame& plus,
                           const DecayingFrame& minus) {
  WronskianQ out;
  out.Q = wronskian(f, plus.basepoint, plus.seq, minus.seq, 0);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(out.Q);
  out.rcond = lu.rcond();
  if (!(out.rcond > 1e-10))
    throw NumericsError("coupling matrix nearly singular (rcond " + std::to_string(out.rcond) +
                        "); frames are not transversal at this energy");
  out.Qinv = lu.inverse();
  return out;
}

Eigen::MatrixXcd green_block(const DecayingFrame& plus, const DecayingFrame& minus,
                             const WronskianQ& Q, long p, long q) {
  if (!(Q.rcond > 0.0))
    throw std::invalid_argument("green_block: coupling certificate missing");
  check_site(plus, p, "green_block");
  check_site(plus, q, "green_block");
  if (p <= q) return -cross_minus_plus(plus, minus, p, q);
  return -cross_plus_minus(plus, minus, p, q);
}

GreenIdentityResiduals verify_green_identities(const JacobiFamily& f, const DecayingFrame& plus,
                                               const DecayingFrame& minus, const WronskianQ& Q,
                                               long n) {
  if (!(Q.rcond > 0.0))
    throw std::invalid_argument("verify_green_identities: coupling certificate missing");
  check_site(plus, n, "verify_green_identities");
  check_site(plus, n + 1, "verify_green_identities");
  const int l = f.l();
  Eigen::MatrixXd D(l, l), V(l, l);
  f.eval_fields(f.base().advance(plus.basepoint, n), D, V);
  const Eigen::MatrixXcd Dinv = D.cast<cxd>().partialPivLu().inverse();
  auto mix = [&](long i, long j) {
    return (cross_minus_plus(plus, minus, i, j) - cross_plus_minus(plus, minus, i, j)).eval();
  };
  GreenIdentityResiduals r;
  r.a = mix(n, n).norm();
  r.b = (mix(n + 1, n) - Dinv).norm();
  r.c = (mix(n, n + 1) + Dinv).norm();
  return r;
}

GreenTable green_table(const DecayingFrame& plus, const DecayingFrame& minus, const WronskianQ& Q,
                       long lo, long hi) {
  if (!(Q.rcond > 0.0))
    throw std::invalid_argument("green_table: coupling certificate missing");
  if (lo > hi) throw std::invalid_argument("green_table: empty window");
  if (lo < plus.seq.lo || hi > plus.seq.hi())
    throw std::invalid_argument("green_table: window exceeds the frame window");
  const long l = plus.stacked_at(lo).cols();
  const long w = hi - lo + 1;
  GreenTable t;
  t.lo = lo;
  t.hi = hi;
  t.z = plus.z;
  t.blocks.assign(size_t(w * w), Eigen::MatrixXcd());

  std::vector<Eigen::MatrixXcd> Winv;
  Winv.reserve(size_t(w));
  for (long n = lo; n <= hi; ++n) Winv.push_back(pairing_inverse(plus, minus, n));
  auto put = [&](long p, long q, Eigen::MatrixXcd G) {
    t.blocks[size_t((p - lo) * w + (q - lo))] = std::move(G);
  };

  // one contractive sweep per column: down the q-th column for p <= q, up for p > q
  for (long q = lo; q <= hi; ++q) {
    Eigen::MatrixXcd X = Winv[size_t(q - lo)] * plus.stacked_at(q).topRows(l).transpose();
    put(q, q, -minus.stacked_at(q).topRows(l) * X);
    for (long p = q - 1; p >= lo; --p) {
      X = minus.step_at(p).triangularView<Eigen::Upper>().solve(X);
      put(p, q, -minus.stacked_at(p).topRows(l) * X);
    }
    Eigen::MatrixXcd Z = minus.stacked_at(q).topRows(l).transpose();
    for (long p = q + 1; p <= hi; ++p) {
      Z = minus.step_at(p - 1).transpose().triangularView<Eigen::Lower>().solve(Z);
      put(p, q, -plus.stacked_at(p).topRows(l) * (Winv[size_t(p - lo)].transpose() * Z));
    }
  }
  return t;
}

double resolvent_check(const JacobiFamily& f, const BasePoint& p, cxd z, long N_frames,
                       long N_truncation, long interior_margin) {
  const long reach = N_truncation - interior_margin;
  if (reach < 0) throw std::invalid_argument("resolvent_check: margin exceeds the section");
  if (N_frames < reach)
    throw std::invalid_argument("resolvent_check: frame window misses the interior sites");
  const int l = f.l();

  const auto [plus, minus] = build_decaying_frames(f, z, p, N_frames);
  const auto Q = coupling_matrix(f, plus, minus);
  const auto table = green_table(plus, minus, Q, -reach, reach);

  const auto t = truncate(f, p, N_truncation);
  Eigen::MatrixXcd Hz = t.matrix.cast<cxd>();
  Hz.diagonal().array() -= z;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Hz);
  if (!(lu.rcond() > 1e-12))
    throw NumericsError(
        "resolvent_check: z is numerically an eigenvalue of the finite section; "
        "retry with a shifted truncation depth");
  const Eigen::MatrixXcd R = lu.inverse();

  double worst = 0.0;
  for (long pp = -reach; pp <= reach; ++pp)
    for (long qq = -reach; qq <= reach; ++qq) {
      const Eigen::MatrixXcd B =
          R.block((pp + N_truncation) * l, (qq + N_truncation) * l, l, l);
      worst = std::max(worst, (table.at(pp, qq) - B).cwiseAbs().maxCoeff());
    }
  return worst;
}

std::vector<HerglotzPoint> herglotz_indicator(const JacobiFamily& f, const BasePoint& p, double x,
                                              const std::vector<double>& y_list) {
  for (size_t i = 0; i + 1 < y_list.size(); ++i)
    if (!(y_list[i] > y_list[i + 1]) || !(y_list[i + 1] > 0.0))
      throw std::invalid_argument("herglotz_indicator: y_list must be positive and decreasing");
  std::vector<HerglotzPoint> out;
  out.reserve(y_list.size());
  for (double y : y_list) {
    HerglotzPoint pt;
    pt.y = y;
    try {
      const cxd z(x, y);
      const auto [plus, minus] = build_decaying_frames(f, z, p, 2);
      const auto Q = coupling_matrix(f, plus, minus);
      const cxd tr = green_block(plus, minus, Q, 0, 0).trace() +
                     green_block(plus, minus, Q, 1, 1).trace();
      pt.value = tr.imag();
      pt.ok = true;
    } catch (const std::exception& e) {
      pt.value = std::numeric_limits<double>::quiet_NaN();
      pt.message = e.what();
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace ugscan
