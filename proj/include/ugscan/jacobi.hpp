// Coefficient fields D, V over the base dynamics and the built-in model presets.
#pragma once
#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ugscan/dynamics.hpp"

namespace ugscan {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationReport {
  bool pass = false;
  double max_symmetry_defect = 0.0;  // worst entry of |V - V^T| and |D - D^T| over samples
  double min_singular_value = 0.0;   // of D over samples
  BasePoint worst_point;             // sample attaining the worse of the two defects
  std::string detail;
};

class JacobiFamily {
public:
  // writes D(p) and V(p) into the out parameters, both l x l real
  using Evaluator = std::function<void(const BasePoint&, Eigen::MatrixXd&, Eigen::MatrixXd&)>;

  static JacobiFamily free_scalar(BaseSystem base = BaseSystem::rotation());
  static JacobiFamily constant_block(BaseSystem base, Eigen::MatrixXd V0);
  static JacobiFamily scalar_cosine(BaseSystem base, double amplitude = 2.0);
  // all entries of V equal a*cos(2 pi x) + b, D = I
  static JacobiFamily matrix_trig(BaseSystem base, int l, double a, double b);
  // per-residue tables over a periodic cycle of length D.size()
  static JacobiFamily periodic_table(std::vector<Eigen::MatrixXd> D, std::vector<Eigen::MatrixXd> V);
  static JacobiFamily custom(BaseSystem base, int l, Evaluator f, std::string label);

  const BaseSystem& base() const { return base_; }
  int l() const { return l_; }
  const std::string& label() const { return label_; }
  double invertibility_threshold() const { return inv_threshold_; }
  void set_invertibility_threshold(double t) { inv_threshold_ = t; }

  void eval_fields(const BasePoint& p, Eigen::MatrixXd& D, Eigen::MatrixXd& V) const;
  ValidationReport validate(const std::vector<BasePoint>& samples) const;

private:
  JacobiFamily(BaseSystem base, int l, Evaluator f, std::string label)
      : base_(std::move(base)), l_(l), eval_(std::move(f)), label_(std::move(label)) {}

  BaseSystem base_;
  int l_ = 1;
  Evaluator eval_;
  std::string label_;
  double inv_threshold_ = 1e-8;
};

}  // namespace ugscan
