// Base dynamics implementation; all iterates use closed forms so orbits are path-independent.
#include "ugscan/dynamics.hpp"

#include <cmath>

namespace ugscan {

double mod1(double t) {
  double r = t - std::floor(t);
  if (r >= 1.0) r -= 1.0;  // guards the rounding case floor(t) == t - 1 with r -> 1.0
  return r;
}

BaseSystem BaseSystem::rotation(double alpha, bool minimal) {
  BaseSystem s;
  s.kind_ = BaseKind::rotation;
  s.alpha_ = mod1(alpha);
  s.minimal_ = minimal;
  return s;
}

BaseSystem BaseSystem::torus_translation(double alpha1, double alpha2, bool minimal) {
  BaseSystem s;
  s.kind_ = BaseKind::torus_translation;
  s.alpha_ = mod1(alpha1);
  s.alpha2_ = mod1(alpha2);
  s.minimal_ = minimal;
  return s;
}

BaseSystem BaseSystem::skew_shift(double alpha, bool minimal) {
  BaseSystem s;
  s.kind_ = BaseKind::skew_shift;
  s.alpha_ = mod1(alpha);
  s.minimal_ = minimal;
  return s;
}

BaseSystem BaseSystem::periodic_cycle(int period) {
  if (period < 1) throw std::invalid_argument("periodic_cycle: period must be >= 1");
  BaseSystem s;
  s.kind_ = BaseKind::periodic_cycle;
  s.period_ = period;
  s.minimal_ = true;
  return s;
}

int BaseSystem::torus_dim() const {
  switch (kind_) {
    case BaseKind::rotation: return 1;
    case BaseKind::torus_translation:
    case BaseKind::skew_shift: return 2;
    case BaseKind::periodic_cycle: return 0;
  }
  return 0;
}

void BaseSystem::check(const BasePoint& p) const {
  if (kind_ == BaseKind::periodic_cycle) {
    if (p.k < 0 || p.k >= period_)
      throw std::out_of_range("BasePoint: cycle index " + std::to_string(p.k) +
                              " out of range for period " + std::to_string(period_));
    return;
  }
  if (!(p.x >= 0.0 && p.x < 1.0) || !(p.y >= 0.0 && p.y < 1.0))
    throw std::out_of_range("BasePoint: torus coordinates not reduced to [0,1)");
}

BasePoint BaseSystem::advance(const BasePoint& p, long n) const {
  check(p);
  BasePoint q = p;
  const double dn = static_cast<double>(n);
  switch (kind_) {
    case BaseKind::rotation:
      q.x = mod1(p.x + dn * alpha_);
      break;
    case BaseKind::torus_translation:
      q.x = mod1(p.x + dn * alpha_);
      q.y = mod1(p.y + dn * alpha2_);
      break;
    case BaseKind::skew_shift: {
      // T(x,y) = (x+a, y+x); T^n(x,y) = (x+na, y+nx + n(n-1)/2 a) for all signs of n
      const double tri = 0.5 * dn * (dn - 1.0);
      q.x = mod1(p.x + dn * alpha_);
      q.y = mod1(p.y + dn * p.x + tri * alpha_);
      break;
    }
    case BaseKind::periodic_cycle: {
      long r = (p.k + n) % period_;
      if (r < 0) r += period_;
      q.k = r;
      break;
    }
  }
  return q;
}

std::vector<BasePoint> BaseSystem::sample(int resolution) const {
  if (resolution < 1) throw std::invalid_argument("sample: resolution must be >= 1");
  std::vector<BasePoint> out;
  switch (kind_) {
    case BaseKind::rotation: {
      out.reserve(resolution);
      for (int i = 0; i < resolution; ++i) out.push_back({double(i) / resolution, 0.0, 0});
      break;
    }
    case BaseKind::torus_translation:
    case BaseKind::skew_shift: {
      out.reserve(size_t(resolution) * resolution);
      for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j)
          out.push_back({double(i) / resolution, double(j) / resolution, 0});
      break;
    }
    case BaseKind::periodic_cycle: {
      out.reserve(period_);
      for (int k = 0; k < period_; ++k) out.push_back({0.0, 0.0, k});
      break;
    }
  }
  return out;
}

}  // namespace ugscan
