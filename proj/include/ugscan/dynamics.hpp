// Invertible base dynamics: circle rotation, torus translation, skew shift, finite cycle.
#pragma once
#include <stdexcept>
#include <string>
#include <vector>

namespace ugscan {

enum class BaseKind { rotation, torus_translation, skew_shift, periodic_cycle };

struct BasePoint {
  double x = 0.0;  // torus coordinates, kept in [0,1)
  double y = 0.0;
  long k = 0;      // cycle state
};

// floor-based reduction into [0,1); handles negatives and the 1.0 rounding edge
double mod1(double t);

class BaseSystem {
public:
  static constexpr double golden = 0.61803398874989484820;  // (sqrt(5)-1)/2

  static BaseSystem rotation(double alpha = golden, bool minimal = true);
  static BaseSystem torus_translation(double alpha1, double alpha2, bool minimal = true);
  static BaseSystem skew_shift(double alpha = golden, bool minimal = true);
  static BaseSystem periodic_cycle(int period);

  BaseKind kind() const { return kind_; }
  int torus_dim() const;
  int period() const { return period_; }
  double alpha() const { return alpha_; }
  double alpha2() const { return alpha2_; }
  bool declared_minimal() const { return minimal_; }

  // closed-form n-th iterate, n of either sign
  BasePoint advance(const BasePoint& p, long n) const;

  // uniform grid of mesh <= 1/resolution per torus coordinate, or all cycle states
  std::vector<BasePoint> sample(int resolution) const;

  void check(const BasePoint& p) const;

private:
  BaseKind kind_ = BaseKind::rotation;
  double alpha_ = golden;
  double alpha2_ = 0.0;
  int period_ = 1;
  bool minimal_ = true;
};

}  // namespace ugscan
