// Model presets and validation of the self-adjointness/invertibility hypotheses.
#include "ugscan/jacobi.hpp"

#include <cmath>
#include <limits>

namespace ugscan {

namespace {
constexpr double two_pi = 6.283185307179586476925286766559;
}

JacobiFamily JacobiFamily::free_scalar(BaseSystem base) {
  Evaluator f = [](const BasePoint&, Eigen::MatrixXd& D, Eigen::MatrixXd& V) {
    D = Eigen::MatrixXd::Identity(1, 1);
    V = Eigen::MatrixXd::Zero(1, 1);
  };
  return JacobiFamily(std::move(base), 1, std::move(f), "free");
}

JacobiFamily JacobiFamily::constant_block(BaseSystem base, Eigen::MatrixXd V0) {
  if (V0.rows() != V0.cols() || V0.rows() < 1) throw ModelError("constant_block: V0 must be square");
  const int l = int(V0.rows());
  Evaluator f = [V0, l](const BasePoint&, Eigen::MatrixXd& D, Eigen::MatrixXd& V) {
    D = Eigen::MatrixXd::Identity(l, l);
    V = V0;
  };
  return JacobiFamily(std::move(base), l, std::move(f), "constant_block");
}

JacobiFamily JacobiFamily::scalar_cosine(BaseSystem base, double amplitude) {
  if (base.kind() == BaseKind::periodic_cycle)
    throw ModelError("scalar_cosine: needs a torus base");
  Evaluator f = [amplitude](const BasePoint& p, Eigen::MatrixXd& D, Eigen::MatrixXd& V) {
    D = Eigen::MatrixXd::Identity(1, 1);
    V = Eigen::MatrixXd::Constant(1, 1, amplitude * std::cos(two_pi * p.x));
  };
  return JacobiFamily(std::move(base), 1, std::move(f), "scalar_cosine");
}

JacobiFamily JacobiFamily::matrix_trig(BaseSystem base, int l, double a, double b) {
  if (l < 1) throw ModelError("matrix_trig: l must be >= 1");
  if (base.kind() == BaseKind::periodic_cycle)
    throw ModelError("matrix_trig: needs a torus base");
  Evaluator f = [l, a, b](const BasePoint& p, Eigen::MatrixXd& D, Eigen::MatrixXd& V) {
    D = Eigen::MatrixXd::Identity(l, l);
    V = Eigen::MatrixXd::Constant(l, l, a * std::cos(two_pi * p.x) + b);
  };
  return JacobiFamily(std::move(base), l, std::move(f), "matrix_trig");
}

JacobiFamily JacobiFamily::periodic_table(std::vector<Eigen::MatrixXd> D, std::vector<Eigen::MatrixXd> V) {
  if (D.empty() || D.size() != V.size())
    throw ModelError("periodic_table: need equally many D and V blocks, at least one");
  const int l = int(D[0].rows());
  for (size_t i = 0; i < D.size(); ++i) {
    if (D[i].rows() != l || D[i].cols() != l || V[i].rows() != l || V[i].cols() != l)
      throw ModelError("periodic_table: block " + std::to_string(i) + " has inconsistent size");
  }
  const int p = int(D.size());
  BaseSystem base = BaseSystem::periodic_cycle(p);
  Evaluator f = [D = std::move(D), V = std::move(V)](const BasePoint& q, Eigen::MatrixXd& Dout,
                                                     Eigen::MatrixXd& Vout) {
    Dout = D[size_t(q.k)];
    Vout = V[size_t(q.k)];
  };
  return JacobiFamily(std::move(base), l, std::move(f), "periodic_table");
}

JacobiFamily JacobiFamily::custom(BaseSystem base, int l, Evaluator f, std::string label) {
  if (l < 1) throw ModelError("custom: l must be >= 1");
  return JacobiFamily(std::move(base), l, std::move(f), std::move(label));
}

void JacobiFamily::eval_fields(const BasePoint& p, Eigen::MatrixXd& D, Eigen::MatrixXd& V) const {
  base_.check(p);
  eval_(p, D, V);
  if (D.rows() != l_ || D.cols() != l_ || V.rows() != l_ || V.cols() != l_)
    throw ModelError("eval_fields: evaluator returned wrong block size for model '" + label_ + "'");
  if (!D.allFinite() || !V.allFinite())
    throw ModelError("eval_fields: non-finite entries in model '" + label_ + "'");
}

ValidationReport JacobiFamily::validate(const std::vector<BasePoint>& samples) const {
  if (samples.empty()) throw ModelError("validate: need at least one sample point");
  ValidationReport rep;
  rep.min_singular_value = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd D, V;
  for (const BasePoint& p : samples) {
    eval_fields(p, D, V);
    // the operator is self-adjoint only when both fields are symmetric
    const double sym = std::max((V - V.transpose()).cwiseAbs().maxCoeff(),
                                (D - D.transpose()).cwiseAbs().maxCoeff());
    const double smin = Eigen::JacobiSVD<Eigen::MatrixXd>(D).singularValues().minCoeff();
    if (sym > rep.max_symmetry_defect) {
      rep.max_symmetry_defect = sym;
      rep.worst_point = p;
    }
    if (smin < rep.min_singular_value) {
      rep.min_singular_value = smin;
      if (smin <= inv_threshold_) rep.worst_point = p;
    }
  }
  rep.pass = rep.max_symmetry_defect < 1e-12 && rep.min_singular_value > inv_threshold_;
  if (!rep.pass) {
    rep.detail = "model '" + label_ + "' fails: symmetry defect " +
                 std::to_string(rep.max_symmetry_defect) + ", min singular value " +
                 std::to_string(rep.min_singular_value) + " at x=" + std::to_string(rep.worst_point.x) +
                 " y=" + std::to_string(rep.worst_point.y) + " k=" + std::to_string(rep.worst_point.k);
  }
  return rep;
}

}  // namespace ugscan
