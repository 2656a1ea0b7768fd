// Deterministic hashing and low-discrepancy sampling of complex unit spheres.
#pragma once
#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string_view>
#include <vector>

namespace ugscan {

uint64_t splitmix64(uint64_t& state);
uint64_t fnv1a64(const void* data, std::size_t len);
uint64_t fnv1a64(std::string_view s);
uint64_t hash_combine(uint64_t h, uint64_t v);

// `count` unit vectors in C^cdim from a shifted Kronecker sequence pushed through the
// Gaussian map, so the set is deterministic in `seed` and evenly spread on the sphere
std::vector<Eigen::VectorXcd> sphere_points(int cdim, int count, uint64_t seed);

}  // namespace ugscan
