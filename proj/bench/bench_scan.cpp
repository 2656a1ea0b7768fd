// serial vs parallel scan timing; both paths must produce identical exports
#include <omp.h>

#include <chrono>
#include <cstdio>

#include "ugscan/scan.hpp"

using namespace ugscan;
using clk = std::chrono::steady_clock;

namespace {

double run(const ScanConfig& cfg, ExecMode mode, std::string& csv, std::string& json) {
  const auto t0 = clk::now();
  const auto res = scan(cfg, mode);
  const double dt = std::chrono::duration<double>(clk::now() - t0).count();
  csv = scan_csv(res);
  json = scan_json(res);
  return dt;
}

}  // namespace

int main() {
  ScanConfig cfg;
  cfg.grid = {-3.0, 3.0, 0.02, 0.0};
  cfg.res.chain_horizon = 256;

  std::string csv_s, json_s, csv_p, json_p;
  const double warm = run(cfg, ExecMode::parallel, csv_p, json_p);  // touch caches once
  const double ts = run(cfg, ExecMode::serial, csv_s, json_s);
  const double tp = run(cfg, ExecMode::parallel, csv_p, json_p);

  std::printf("grid points: %ld\n", long((cfg.grid.max - cfg.grid.min) / cfg.grid.step) + 1);
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("serial:   %8.3f s\n", ts);
  std::printf("parallel: %8.3f s  (warmup %.3f s)\n", tp, warm);
  std::printf("speedup:  %8.2fx\n", ts / tp);

  if (csv_s != csv_p || json_s != json_p) {
    std::printf("FAIL: serial and parallel exports differ\n");
    return 1;
  }
  std::printf("serial and parallel exports are byte-identical\n");
  return 0;
}
