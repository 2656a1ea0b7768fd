// Config-driven energy-axis scans: per-point indicators, vote aggregation, exporters.
#pragma once
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ugscan/green.hpp"
#include "ugscan/hyperbolicity.hpp"
#include "ugscan/operator_core.hpp"

namespace ugscan {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  double min = -3.0;
  double max = 3.0;
  double step = 0.01;
  double imag = 0.0;  // fixed imaginary offset added to every grid point
};

struct MethodSet {
  bool growth = true;
  bool certify = false;
  bool bounded = false;
  bool truncation = true;
  bool monodromy = false;  // requires an (effectively) periodic base
  bool herglotz = false;
};

// numeric knobs; the edge skin and vote thresholds are empirical and deliberately exposed
struct Resolutions {
  int base_resolution = 64;
  int sphere_samples = 512;
  long chain_horizon = 256;         // N for the growth indicator
  long truncation_half_width = 0;   // 0: auto (200 for l = 1, 100 otherwise)
  long bounded_horizon = 64;
  double edge_skin = 0.02;          // truncation votes spectrum within this distance
  double growth_slope_tol = 0.02;   // growth votes resolvent at log lambda >= tol
  double bounded_tol = 0.05;        // bounded votes spectrum at sup <= 1 + tol
  double bounded_divergent = 10.0;  // bounded votes resolvent at sup >= this
  std::vector<double> certify_eps_ladder{0.5, 0.25, 0.1};
  int certify_r_max = 64;
  std::vector<double> herglotz_y_ladder{0.1, 0.03, 0.01, 0.003, 0.001};
  double herglotz_zero_tol = 1e-2;     // votes resolvent below this at the last rung
  double herglotz_divergent_tol = 1e3; // abstains above this (indicator off the rails)
};

struct OutputSpec {
  std::string path = "scan.csv";
  std::string format = "csv";  // csv | json
};

struct BaseSpec {
  std::string kind = "rotation";  // rotation | torus_translation | skew_shift | periodic_cycle
  double alpha = BaseSystem::golden;
  double alpha2 = 0.41421356237309515;  // second frequency for torus_translation
  bool minimal = true;
  int period = 2;
};

struct ModelSpec {
  std::string kind = "free_scalar";  // free_scalar | constant_block | scalar_cosine |
                                     // matrix_trig | periodic_table
  double amplitude = 2.0;            // scalar_cosine
  int l = 2;                         // matrix_trig
  double a = 0.7, b = 0.2;           // matrix_trig couplings
  std::vector<std::vector<double>> V0;  // constant_block, row-major
  std::vector<std::vector<std::vector<double>>> D_table;  // periodic_table blocks
  std::vector<std::vector<std::vector<double>>> V_table;
};

struct ScanConfig {
  BaseSpec base;
  ModelSpec model;
  GridSpec grid;
  MethodSet methods;
  Resolutions res;
  OutputSpec output;
};

// strict parser: unknown keys and malformed values are rejected with their field path;
// missing sections and keys fall back to the defaults above
ScanConfig parse_config(const std::string& text);

// canonical form: fixed key order, model/base sections carry only their kind's fields;
// parse(serialize(c)) == c and serialize(parse(s)) is a fixed point
std::string serialize_config(const ScanConfig& cfg);

uint64_t config_hash(const ScanConfig& cfg);  // over the canonical serialization

BaseSystem make_base(const BaseSpec& spec);
JacobiFamily make_model(const ScanConfig& cfg);

struct ScanRecord {
  double x = 0.0;
  double lambda_estimate = std::numeric_limits<double>::quiet_NaN();
  std::string cert_verdict;  // empty when certify is disabled
  double bounded_sup = std::numeric_limits<double>::quiet_NaN();
  double nearest_truncated_eig = std::numeric_limits<double>::quiet_NaN();
  double herglotz_limit = std::numeric_limits<double>::quiet_NaN();
  std::string classification = "undecided";  // resolvent | spectrum | undecided
  bool disagreement = false;  // methods voted both ways
  std::string error;          // per-method failures, scan continues
};

struct ScanResult {
  uint64_t config_hash = 0;
  std::vector<ScanRecord> records;
  bool partial = false;  // some record carries an error
};

// classification is unanimous-vote: resolvent/spectrum only when every non-abstaining
// enabled method agrees, undecided (plus a flag) on any disagreement
ScanResult scan(const ScanConfig& cfg, ExecMode exec = ExecMode::parallel);

std::string scan_csv(const ScanResult& res);
std::string scan_json(const ScanResult& res);
void export_scan(const ScanResult& res, const std::string& format, const std::string& path);

}  // namespace ugscan
