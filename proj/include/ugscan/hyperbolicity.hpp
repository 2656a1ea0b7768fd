// Uniform-growth certification, stable/unstable splitting, and bounded-orbit search.
#pragma once
#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ugscan/cocycle.hpp"
#include "ugscan/exec.hpp"

namespace ugscan {

// raised when the singular-value gap at the l/(l+1) split is too small to trust
struct SplittingError : std::runtime_error {
  double gap;
  SplittingError(const std::string& msg, double g) : std::runtime_error(msg), gap(g) {}
};

struct GrowthReport {
  double lambda_estimate = std::numeric_limits<double>::quiet_NaN();
  double beta_estimate = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> slopes;  // per sample, (log s_l - log s_{l+1}) / (2N)
  double min_slope = 0.0;
  double max_slope = 0.0;
};

// growth-gap slopes of A_N over the sample set; lambda from the worst sample
GrowthReport growth_indicator(const JacobiFamily& f, cxd z, const std::vector<BasePoint>& samples,
                              long N, ExecMode exec = ExecMode::parallel);

enum class UGVerdict { certified, refuted, inconclusive };
std::string verdict_token(UGVerdict v);

struct Counterexample {
  BasePoint at;
  Eigen::VectorXcd v;
  double sup_norm = 0.0;  // max over |n| <= horizon of ||A_n v||
  long achieving_n = 0;
};

struct CertifyOptions {
  std::vector<double> eps_ladder{0.5, 0.25, 0.1};
  int r_max = 64;
  int base_resolution = 64;
  int sphere_samples = 512;  // per l=1; scaled by l^2 internally
  long bounded_horizon = 64;
  // per-direction sweeps only run when the certification chains show at least this
  // much growth-gap slope (they cannot succeed without growth); exhaustive overrides
  double sweep_slope_gate = 0.01;
  bool exhaustive = false;
  uint64_t seed = 0;
  ExecMode exec = ExecMode::parallel;
};

struct SubspaceFrame {
  BasePoint at;
  Eigen::MatrixXcd columns;  // 2l x l, orthonormal
  bool stable = true;
};

struct HyperbolicityReport {
  cxd z;
  UGVerdict verdict = UGVerdict::inconclusive;
  double epsilon = 0.0;
  int R = 0;
  double margin = std::numeric_limits<double>::quiet_NaN();  // min achieved bound minus (1+eps)
  double lambda_estimate = std::numeric_limits<double>::quiet_NaN();
  double beta_estimate = std::numeric_limits<double>::quiet_NaN();
  double min_angle_gap = std::numeric_limits<double>::quiet_NaN();
  std::optional<Counterexample> counterexample;
  std::vector<std::pair<SubspaceFrame, SubspaceFrame>> frames;  // stable/unstable per sample
  int grid_resolution = 0;
  int sphere_samples = 0;
  std::string note;
};

// fixed (epsilon, R) check over the sampled grid and directions
HyperbolicityReport ug_certify_at(const JacobiFamily& f, cxd z, double epsilon, int R,
                                  const CertifyOptions& opt = {});
// ladder search: strongest epsilon first, doubling depths up to r_max
HyperbolicityReport ug_certify(const JacobiFamily& f, cxd z, const CertifyOptions& opt = {});

// right singular subspaces of A_{+N} (stable) and A_{-N} (unstable) at p
std::pair<SubspaceFrame, SubspaceFrame> splitting(const JacobiFamily& f, cxd z, const BasePoint& p,
                                                  long N);
std::vector<std::pair<SubspaceFrame, SubspaceFrame>> splitting_orbit(const JacobiFamily& f, cxd z,
                                                                     const BasePoint& p, int steps,
                                                                     long N);

double min_principal_angle(const Eigen::MatrixXcd& Q1, const Eigen::MatrixXcd& Q2);
double subspace_distance(const Eigen::MatrixXcd& Q1, const Eigen::MatrixXcd& Q2);

// max over consecutive frame pairs of the distance between A(omega)s(omega) and s(T omega)
double check_invariance(const JacobiFamily& f, cxd z,
                        const std::vector<std::pair<SubspaceFrame, SubspaceFrame>>& frames);

// min over frame pairs of the smallest principal angle between stable and unstable spans
double angle_gap(const std::vector<std::pair<SubspaceFrame, SubspaceFrame>>& frames);

struct BoundedOrbitResult {
  BasePoint at;
  Eigen::VectorXcd v;
  double sup_norm = 0.0;
  long achieving_n = 0;
};

// minimizes max_{|n| <= N} ||A_n(omega)v|| over the sampled grid and directions,
// then sharpens the winner by a shrinking local search
BoundedOrbitResult bounded_orbit_search(const JacobiFamily& f, cxd z, int base_resolution,
                                        int sphere_samples, long N, uint64_t seed = 0,
                                        ExecMode exec = ExecMode::parallel);

}  // namespace ugscan
