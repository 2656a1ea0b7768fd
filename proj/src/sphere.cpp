// Hashes for reproducible seeding plus the Kronecker-sequence sphere sampler.
#include "ugscan/sphere.hpp"

#include <cmath>
#include <stdexcept>

namespace ugscan {

uint64_t splitmix64(uint64_t& state) {
  uint64_t x = (state += 0x9e3779b97f4a7c15ull);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* b = static_cast<const unsigned char*>(data);
  uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= b[i];
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

uint64_t hash_combine(uint64_t h, uint64_t v) {
  uint64_t s = h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
  return splitmix64(s);
}

namespace {

double frac(double t) { return t - std::floor(t); }

// root of x^{d+1} = x + 1 in (1,2); its inverse powers give the d-dimensional
// Kronecker directions with good joint equidistribution
double harmonious(int d) {
  double x = 1.5;
  for (int it = 0; it < 100; ++it) {
    const double g = std::pow(x, d + 1) - x - 1.0;
    const double dg = (d + 1) * std::pow(x, d) - 1.0;
    const double nx = x - g / dg;
    if (nx == x) break;
    x = nx;
  }
  return x;
}

constexpr double two_pi = 6.283185307179586476925286766559;

}  // namespace

std::vector<Eigen::VectorXcd> sphere_points(int cdim, int count, uint64_t seed) {
  if (cdim < 1 || count < 0) throw std::invalid_argument("sphere_points: bad arguments");
  const int d = 2 * cdim;  // real Gaussian coordinates per point
  const double phi = harmonious(d);
  std::vector<double> alpha(d), shift(d);
  uint64_t st = seed;
  double inv = 1.0;
  for (int j = 0; j < d; ++j) {
    inv /= phi;
    alpha[j] = frac(inv);
    shift[j] = double(splitmix64(st) >> 11) * 0x1.0p-53;
  }

  std::vector<Eigen::VectorXcd> out;
  out.reserve(size_t(count));
  std::vector<double> g(static_cast<std::size_t>(d));
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < d; j += 2) {
      double u1 = frac(shift[j] + (i + 1) * alpha[j]);
      const double u2 = frac(shift[j + 1] + (i + 1) * alpha[j + 1]);
      if (u1 < 1e-300) u1 = 1e-300;
      const double r = std::sqrt(-2.0 * std::log(u1));
      g[j] = r * std::cos(two_pi * u2);
      g[j + 1] = r * std::sin(two_pi * u2);
    }
    Eigen::VectorXcd v(cdim);
    for (int k = 0; k < cdim; ++k) v[k] = std::complex<double>(g[2 * k], g[2 * k + 1]);
    const double nn = v.norm();
    if (nn > 0.0) {
      out.push_back(v / nn);
    } else {
      v.setZero();
      v[0] = 1.0;
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace ugscan
