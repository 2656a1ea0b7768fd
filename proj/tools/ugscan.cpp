// command line front end: scans, single-point certificates, Green tables, spectra
#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ugscan/green.hpp"
#include "ugscan/hyperbolicity.hpp"
#include "ugscan/operator_core.hpp"
#include "ugscan/scan.hpp"
#include "ugscan/sphere.hpp"

using namespace ugscan;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScanConfig load_config(const std::string& path) {
  if (path.empty()) return parse_config("{}");
  return parse_config(slurp(path));
}

JacobiFamily validated_model(const ScanConfig& cfg) {
  auto f = make_model(cfg);
  const auto rep = f.validate(f.base().sample(std::min(cfg.res.base_resolution, 64)));
  if (!rep.pass) throw ModelError(rep.detail);
  return f;
}

void set_methods(ScanConfig& cfg, const std::vector<std::string>& names) {
  if (names.empty()) return;
  MethodSet m{false, false, false, false, false, false};
  for (const auto& n : names) {
    if (n == "growth")
      m.growth = true;
    else if (n == "certify")
      m.certify = true;
    else if (n == "bounded")
      m.bounded = true;
    else if (n == "truncation")
      m.truncation = true;
    else if (n == "monodromy")
      m.monodromy = true;
    else if (n == "herglotz")
      m.herglotz = true;
    else
      throw ConfigError("methods: unknown method '" + n + "'");
  }
  cfg.methods = m;
}

int run_scan(const ScanConfig& cfg, bool serial) {
  const auto res = scan(cfg, serial ? ExecMode::serial : ExecMode::parallel);
  export_scan(res, cfg.output.format, cfg.output.path);
  size_t spectrum = 0, resolvent = 0, undecided = 0, errored = 0;
  for (const auto& r : res.records) {
    if (r.classification == "spectrum")
      ++spectrum;
    else if (r.classification == "resolvent")
      ++resolvent;
    else
      ++undecided;
    if (!r.error.empty()) ++errored;
  }
  std::printf("scan: %zu points (%zu spectrum, %zu resolvent, %zu undecided) -> %s\n",
              res.records.size(), spectrum, resolvent, undecided, cfg.output.path.c_str());
  if (res.partial) {
    std::fprintf(stderr, "scan: %zu points reported method errors\n", errored);
    return 3;
  }
  return 0;
}

int run_certify(const ScanConfig& cfg, double zre, double zim, bool exhaustive) {
  const auto f = validated_model(cfg);
  const cxd z(zre, zim);
  CertifyOptions opt;
  opt.eps_ladder = cfg.res.certify_eps_ladder;
  opt.r_max = cfg.res.certify_r_max;
  opt.base_resolution = cfg.res.base_resolution;
  opt.sphere_samples = cfg.res.sphere_samples;
  opt.bounded_horizon = cfg.res.bounded_horizon;
  opt.exhaustive = exhaustive;
  opt.seed = hash_combine(config_hash(cfg), std::bit_cast<uint64_t>(zre));
  const auto rep = ug_certify(f, z, opt);
  std::printf("z = %.17g%+.17gi  model = %s\n", zre, zim, f.label().c_str());
  std::printf("verdict: %s\n", verdict_token(rep.verdict).c_str());
  if (rep.verdict == UGVerdict::certified) {
    std::printf("epsilon = %g  R = %d  margin = %.6g\n", rep.epsilon, rep.R, rep.margin);
    std::printf("lambda ~ %.6g  beta ~ %.6g  min angle gap = %.6g\n", rep.lambda_estimate,
                rep.beta_estimate, rep.min_angle_gap);
  } else if (rep.verdict == UGVerdict::refuted && rep.counterexample) {
    const auto& c = *rep.counterexample;
    std::printf("bounded direction: sup |A_n v| = %.6g achieved at n = %ld\n", c.sup_norm,
                c.achieving_n);
  }
  if (!rep.note.empty()) std::printf("note: %s\n", rep.note.c_str());
  std::printf("grid resolution %d, sphere samples %d\n", rep.grid_resolution, rep.sphere_samples);
  return 0;
}

int run_green(const ScanConfig& cfg, double zre, double zim, long depth, long window) {
  const auto f = validated_model(cfg);
  const cxd z(zre, zim);
  const BasePoint p{};
  const auto [plus, minus] = build_decaying_frames(f, z, p, depth);
  const auto Q = coupling_matrix(f, plus, minus);
  std::printf("z = %.17g%+.17gi  model = %s  coupling rcond = %.3g\n", zre, zim,
              f.label().c_str(), Q.rcond);
  const auto table = green_table(plus, minus, Q, -window, window);
  for (long q = -window; q <= window; ++q)
    for (long pp = -window; pp <= window; ++pp) {
      const auto& G = table.at(pp, q);
      std::printf("G(%ld,%ld) =", pp, q);
      for (long i = 0; i < G.rows(); ++i)
        for (long j = 0; j < G.cols(); ++j)
          std::printf(" %.12g%+.12gi", G(i, j).real(), G(i, j).imag());
      std::printf("\n");
    }
  double worst = 0.0;
  for (long n = -window; n < window; ++n) {
    const auto r = verify_green_identities(f, plus, minus, Q, n);
    worst = std::max({worst, r.a, r.b, r.c});
    std::printf("identities at n=%ld: diag %.3g  sub %.3g  super %.3g\n", n, r.a, r.b, r.c);
  }
  std::printf("worst identity residual: %.6g\n", worst);
  return 0;
}

int run_spectrum(const ScanConfig& cfg, long N) {
  const auto f = validated_model(cfg);
  const auto eig = truncated_spectrum(truncate(f, BasePoint{}, N));
  std::printf("model = %s  sites [-%ld, %ld]  l = %d  eigenvalues: %ld\n", f.label().c_str(), N, N,
              f.l(), long(eig.size()));
  for (long i = 0; i < eig.size(); ++i) std::printf("%.17g\n", eig[i]);
  return 0;
}

int run_weyl(const ScanConfig& cfg, double zre, double zim, const std::vector<long>& Ls) {
  const auto f = validated_model(cfg);
  const cxd z(zre, zim);
  Eigen::VectorXcd u0 = Eigen::VectorXcd::Ones(f.l());
  Eigen::VectorXcd u1 = Eigen::VectorXcd::Constant(f.l(), cxd(0.3, 0.0));
  std::printf("z = %.17g%+.17gi  model = %s\n", zre, zim, f.label().c_str());
  std::printf("L,residual\n");
  for (long L : Ls)
    std::printf("%ld,%.17g\n", L, weyl_residual(f, BasePoint{}, z, L, u0, u1));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uniform hyperbolicity scanner for dynamically defined Jacobi operators"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "configuration file (JSON)");

  auto* sc_scan = app.add_subcommand("scan", "classify an energy grid as spectrum vs resolvent");
  double gmin = 0, gmax = 0, gstep = 0, gimag = 0;
  std::string out_path, out_format;
  std::vector<std::string> methods;
  bool serial = false;
  auto* o_min = sc_scan->add_option("--min", gmin, "grid minimum");
  auto* o_max = sc_scan->add_option("--max", gmax, "grid maximum");
  auto* o_step = sc_scan->add_option("--step", gstep, "grid step");
  auto* o_imag = sc_scan->add_option("--imag", gimag, "imaginary offset");
  sc_scan->add_option("--output", out_path, "output path");
  sc_scan->add_option("--format", out_format, "csv or json");
  sc_scan->add_option("--methods", methods, "methods to enable")->delimiter(',');
  sc_scan->add_flag("--serial", serial, "disable the parallel grid fan-out");

  auto* sc_cert = app.add_subcommand("certify", "single-point certificate report");
  double zre = 0, zim = 0;
  bool exhaustive = false;
  sc_cert->add_option("--z", zre, "energy (real part)")->required();
  sc_cert->add_option("--zim", zim, "imaginary part");
  sc_cert->add_flag("--exhaustive", exhaustive, "sweep directions even without growth");

  auto* sc_green = app.add_subcommand("green", "Green table and identity residuals");
  long depth = 64, window = 3;
  sc_green->add_option("--z", zre, "energy (real part)")->required();
  sc_green->add_option("--zim", zim, "imaginary part");
  sc_green->add_option("--depth", depth, "frame propagation depth");
  sc_green->add_option("--window", window, "table half width");

  auto* sc_spec = app.add_subcommand("spectrum", "truncated eigenvalue dump");
  long Nspec = 100;
  sc_spec->add_option("--N", Nspec, "truncation half width")->required();

  auto* sc_weyl = app.add_subcommand("weyl", "Weyl residual curve");
  std::vector<long> Ls;
  sc_weyl->add_option("--z", zre, "energy (real part)")->required();
  sc_weyl->add_option("--zim", zim, "imaginary part");
  sc_weyl->add_option("--L", Ls, "window half widths")->required()->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    ScanConfig cfg = load_config(config_path);
    if (sc_scan->parsed()) {
      if (*o_min) cfg.grid.min = gmin;
      if (*o_max) cfg.grid.max = gmax;
      if (*o_step) cfg.grid.step = gstep;
      if (*o_imag) cfg.grid.imag = gimag;
      if (!out_path.empty()) cfg.output.path = out_path;
      if (!out_format.empty()) cfg.output.format = out_format;
      set_methods(cfg, methods);
      cfg = parse_config(serialize_config(cfg));  // re-validate after overrides
      return run_scan(cfg, serial);
    }
    if (sc_cert->parsed()) return run_certify(cfg, zre, zim, exhaustive);
    if (sc_green->parsed()) return run_green(cfg, zre, zim, depth, window);
    if (sc_spec->parsed()) return run_spectrum(cfg, Nspec);
    if (sc_weyl->parsed()) return run_weyl(cfg, zre, zim, Ls);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const ModelError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
