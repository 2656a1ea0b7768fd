// Config parsing, the scan engine and its vote aggregation, CSV/JSON exporters.
#include "ugscan/scan.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "ugscan/sphere.hpp"

namespace ugscan {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void expect_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys)
      if (item.key() == k) known = true;
    if (!known) bad(path + "." + item.key(), "unknown key");
  }
}

const json* section(const json& root, const char* name) {
  if (!root.contains(name)) return nullptr;
  const json& s = root.at(name);
  if (!s.is_object()) bad(name, "expected an object");
  return &s;
}

double get_num(const json& j, const std::string& path, const char* key, double dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number()) bad(path + "." + key, "expected a number");
  return v.get<double>();
}

long get_int(const json& j, const std::string& path, const char* key, long dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number_integer()) bad(path + "." + key, "expected an integer");
  return v.get<long>();
}

bool get_bool(const json& j, const std::string& path, const char* key, bool dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_boolean()) bad(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

std::string get_string(const json& j, const std::string& path, const char* key,
                       const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_string()) bad(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_num_list(const json& j, const std::string& path, const char* key,
                                 std::vector<double> dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_array()) bad(path + "." + key, "expected an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) bad(path + "." + key, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> get_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) bad(path, "expected a nonempty matrix (array of rows)");
  std::vector<std::vector<double>> rows;
  for (const json& r : v) {
    if (!r.is_array() || r.empty()) bad(path, "expected a nonempty matrix (array of rows)");
    std::vector<double> row;
    for (const json& e : r) {
      if (!e.is_number()) bad(path, "matrix entries must be numbers");
      row.push_back(e.get<double>());
    }
    if (!rows.empty() && row.size() != rows.front().size()) bad(path, "ragged matrix");
    rows.push_back(std::move(row));
  }
  return rows;
}

json matrix_json(const std::vector<std::vector<double>>& rows) {
  json m = json::array();
  for (const auto& r : rows) m.push_back(r);
  return m;
}

bool square(const std::vector<std::vector<double>>& rows) {
  return !rows.empty() && rows.front().size() == rows.size();
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
  Eigen::MatrixXd M(long(rows.size()), long(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) M(long(i), long(j)) = rows[i][j];
  return M;
}

constexpr const char* kMethodNames[] = {"growth",     "certify",   "bounded",
                                        "truncation", "monodromy", "herglotz"};

bool* method_slot(MethodSet& m, const std::string& name) {
  if (name == "growth") return &m.growth;
  if (name == "certify") return &m.certify;
  if (name == "bounded") return &m.bounded;
  if (name == "truncation") return &m.truncation;
  if (name == "monodromy") return &m.monodromy;
  if (name == "herglotz") return &m.herglotz;
  return nullptr;
}

bool method_enabled(const MethodSet& m, const std::string& name) {
  MethodSet copy = m;
  const bool* slot = method_slot(copy, name);
  return slot && *slot;
}

bool base_is_periodic(const ScanConfig& c) {
  return c.model.kind == "periodic_table" || c.base.kind == "periodic_cycle";
}

void validate_config(const ScanConfig& c) {
  static const char* base_kinds[] = {"rotation", "torus_translation", "skew_shift",
                                     "periodic_cycle"};
  if (std::find_if(std::begin(base_kinds), std::end(base_kinds),
                   [&](const char* k) { return c.base.kind == k; }) == std::end(base_kinds))
    bad("base.kind", "unknown base kind '" + c.base.kind + "'");
  if (!std::isfinite(c.base.alpha) || !std::isfinite(c.base.alpha2))
    bad("base.alpha", "must be finite");
  if (c.base.period < 1) bad("base.period", "must be >= 1");

  static const char* model_kinds[] = {"free_scalar", "constant_block", "scalar_cosine",
                                      "matrix_trig", "periodic_table"};
  if (std::find_if(std::begin(model_kinds), std::end(model_kinds),
                   [&](const char* k) { return c.model.kind == k; }) == std::end(model_kinds))
    bad("model.kind", "unknown model kind '" + c.model.kind + "'");
  if (c.model.kind == "constant_block" && !square(c.model.V0))
    bad("model.V0", "must be a nonempty square matrix");
  if (c.model.kind == "scalar_cosine" && !std::isfinite(c.model.amplitude))
    bad("model.amplitude", "must be finite");
  if (c.model.kind == "matrix_trig" && c.model.l < 1) bad("model.l", "must be >= 1");
  if (c.model.kind == "periodic_table") {
    if (c.model.D_table.empty() || c.model.D_table.size() != c.model.V_table.size())
      bad("model.D_table", "D_table and V_table must be nonempty and equally long");
    const size_t l = c.model.D_table.front().size();
    for (const auto& blk : c.model.D_table)
      if (!square(blk) || blk.size() != l) bad("model.D_table", "blocks must be square, equal size");
    for (const auto& blk : c.model.V_table)
      if (!square(blk) || blk.size() != l) bad("model.V_table", "blocks must be square, equal size");
  }

  if (!(c.grid.step > 0.0)) bad("grid.step", "must be > 0");
  if (!(c.grid.min < c.grid.max)) bad("grid.min", "must be < grid.max");
  if (!std::isfinite(c.grid.imag)) bad("grid.imag", "must be finite");

  const MethodSet& m = c.methods;
  if (!(m.growth || m.certify || m.bounded || m.truncation || m.monodromy || m.herglotz))
    bad("methods", "at least one method must be enabled");
  if (m.monodromy && !base_is_periodic(c))
    bad("methods", "monodromy requires a periodic base (periodic_cycle or periodic_table)");

  const Resolutions& r = c.res;
  if (r.base_resolution < 1) bad("resolutions.base_resolution", "must be >= 1");
  if (r.sphere_samples < 1) bad("resolutions.sphere_samples", "must be >= 1");
  if (r.chain_horizon < 32) bad("resolutions.chain_horizon", "must be >= 32");
  if (r.truncation_half_width < 0) bad("resolutions.truncation_half_width", "must be >= 0");
  if (r.bounded_horizon < 1) bad("resolutions.bounded_horizon", "must be >= 1");
  if (!(r.edge_skin > 0.0)) bad("resolutions.edge_skin", "must be > 0");
  if (!(r.growth_slope_tol > 0.0)) bad("resolutions.growth_slope_tol", "must be > 0");
  if (!(r.bounded_tol > 0.0)) bad("resolutions.bounded_tol", "must be > 0");
  if (!(r.bounded_divergent > 1.0)) bad("resolutions.bounded_divergent", "must be > 1");
  if (r.certify_eps_ladder.empty()) bad("resolutions.certify_eps_ladder", "must be nonempty");
  for (double e : r.certify_eps_ladder)
    if (!(e > 0.0)) bad("resolutions.certify_eps_ladder", "entries must be > 0");
  if (r.certify_r_max < 1) bad("resolutions.certify_r_max", "must be >= 1");
  if (r.herglotz_y_ladder.empty()) bad("resolutions.herglotz_y_ladder", "must be nonempty");
  for (size_t i = 0; i < r.herglotz_y_ladder.size(); ++i) {
    if (!(r.herglotz_y_ladder[i] > 0.0))
      bad("resolutions.herglotz_y_ladder", "must be positive and strictly decreasing");
    if (i > 0 && !(r.herglotz_y_ladder[i] < r.herglotz_y_ladder[i - 1]))
      bad("resolutions.herglotz_y_ladder", "must be positive and strictly decreasing");
  }
  if (!(r.herglotz_zero_tol > 0.0)) bad("resolutions.herglotz_zero_tol", "must be > 0");
  if (!(r.herglotz_divergent_tol > r.herglotz_zero_tol))
    bad("resolutions.herglotz_divergent_tol", "must exceed herglotz_zero_tol");

  if (c.output.format != "csv" && c.output.format != "json")
    bad("output.format", "must be csv or json");
  if (c.output.path.empty()) bad("output.path", "must not be empty");
}

enum class Vote { resolvent, spectrum, abstain };

struct VoteBox {
  bool resolvent = false;
  bool spectrum = false;
  void cast(Vote v) {
    if (v == Vote::resolvent) resolvent = true;
    if (v == Vote::spectrum) spectrum = true;
  }
};

}  // namespace

ScanConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  expect_keys(root, "config", {"base", "model", "grid", "methods", "resolutions", "output"});

  ScanConfig c;
  if (const json* b = section(root, "base")) {
    expect_keys(*b, "base", {"kind", "alpha", "alpha2", "minimal", "period"});
    c.base.kind = get_string(*b, "base", "kind", c.base.kind);
    c.base.alpha = get_num(*b, "base", "alpha", c.base.alpha);
    c.base.alpha2 = get_num(*b, "base", "alpha2", c.base.alpha2);
    c.base.minimal = get_bool(*b, "base", "minimal", c.base.minimal);
    c.base.period = int(get_int(*b, "base", "period", c.base.period));
  }
  if (const json* m = section(root, "model")) {
    expect_keys(*m, "model", {"kind", "amplitude", "l", "a", "b", "V0", "D_table", "V_table"});
    c.model.kind = get_string(*m, "model", "kind", c.model.kind);
    c.model.amplitude = get_num(*m, "model", "amplitude", c.model.amplitude);
    c.model.l = int(get_int(*m, "model", "l", c.model.l));
    c.model.a = get_num(*m, "model", "a", c.model.a);
    c.model.b = get_num(*m, "model", "b", c.model.b);
    if (m->contains("V0")) c.model.V0 = get_matrix(m->at("V0"), "model.V0");
    for (const char* key : {"D_table", "V_table"}) {
      if (!m->contains(key)) continue;
      const json& t = m->at(key);
      if (!t.is_array() || t.empty())
        bad(std::string("model.") + key, "expected a nonempty array of matrices");
      auto& dst = std::string(key) == "D_table" ? c.model.D_table : c.model.V_table;
      for (const json& blk : t) dst.push_back(get_matrix(blk, std::string("model.") + key));
    }
  }
  if (const json* g = section(root, "grid")) {
    expect_keys(*g, "grid", {"min", "max", "step", "imag"});
    c.grid.min = get_num(*g, "grid", "min", c.grid.min);
    c.grid.max = get_num(*g, "grid", "max", c.grid.max);
    c.grid.step = get_num(*g, "grid", "step", c.grid.step);
    c.grid.imag = get_num(*g, "grid", "imag", c.grid.imag);
  }
  if (root.contains("methods")) {
    const json& m = root.at("methods");
    if (!m.is_array()) throw ConfigError("methods: expected an array of method names");
    c.methods = MethodSet{false, false, false, false, false, false};
    for (const json& e : m) {
      if (!e.is_string()) bad("methods", "entries must be method names");
      bool* slot = method_slot(c.methods, e.get<std::string>());
      if (!slot) bad("methods", "unknown method '" + e.get<std::string>() + "'");
      *slot = true;
    }
  }
  if (const json* r = section(root, "resolutions")) {
    expect_keys(*r, "resolutions",
                {"base_resolution", "sphere_samples", "chain_horizon", "truncation_half_width",
                 "bounded_horizon", "edge_skin", "growth_slope_tol", "bounded_tol",
                 "bounded_divergent", "certify_eps_ladder", "certify_r_max", "herglotz_y_ladder",
                 "herglotz_zero_tol", "herglotz_divergent_tol"});
    Resolutions& q = c.res;
    q.base_resolution = int(get_int(*r, "resolutions", "base_resolution", q.base_resolution));
    q.sphere_samples = int(get_int(*r, "resolutions", "sphere_samples", q.sphere_samples));
    q.chain_horizon = get_int(*r, "resolutions", "chain_horizon", q.chain_horizon);
    q.truncation_half_width =
        get_int(*r, "resolutions", "truncation_half_width", q.truncation_half_width);
    q.bounded_horizon = get_int(*r, "resolutions", "bounded_horizon", q.bounded_horizon);
    q.edge_skin = get_num(*r, "resolutions", "edge_skin", q.edge_skin);
    q.growth_slope_tol = get_num(*r, "resolutions", "growth_slope_tol", q.growth_slope_tol);
    q.bounded_tol = get_num(*r, "resolutions", "bounded_tol", q.bounded_tol);
    q.bounded_divergent = get_num(*r, "resolutions", "bounded_divergent", q.bounded_divergent);
    q.certify_eps_ladder =
        get_num_list(*r, "resolutions", "certify_eps_ladder", q.certify_eps_ladder);
    q.certify_r_max = int(get_int(*r, "resolutions", "certify_r_max", q.certify_r_max));
    q.herglotz_y_ladder =
        get_num_list(*r, "resolutions", "herglotz_y_ladder", q.herglotz_y_ladder);
    q.herglotz_zero_tol = get_num(*r, "resolutions", "herglotz_zero_tol", q.herglotz_zero_tol);
    q.herglotz_divergent_tol =
        get_num(*r, "resolutions", "herglotz_divergent_tol", q.herglotz_divergent_tol);
  }
  if (const json* o = section(root, "output")) {
    expect_keys(*o, "output", {"path", "format"});
    c.output.path = get_string(*o, "output", "path", c.output.path);
    c.output.format = get_string(*o, "output", "format", c.output.format);
  }

  validate_config(c);
  return c;
}

std::string serialize_config(const ScanConfig& cfg) {
  validate_config(cfg);
  json j;
  json b;
  b["kind"] = cfg.base.kind;
  if (cfg.base.kind == "periodic_cycle") {
    b["period"] = cfg.base.period;
  } else {
    b["alpha"] = cfg.base.alpha;
    if (cfg.base.kind == "torus_translation") b["alpha2"] = cfg.base.alpha2;
    b["minimal"] = cfg.base.minimal;
  }
  j["base"] = std::move(b);

  json m;
  m["kind"] = cfg.model.kind;
  if (cfg.model.kind == "constant_block") m["V0"] = matrix_json(cfg.model.V0);
  if (cfg.model.kind == "scalar_cosine") m["amplitude"] = cfg.model.amplitude;
  if (cfg.model.kind == "matrix_trig") {
    m["l"] = cfg.model.l;
    m["a"] = cfg.model.a;
    m["b"] = cfg.model.b;
  }
  if (cfg.model.kind == "periodic_table") {
    json dt = json::array(), vt = json::array();
    for (const auto& blk : cfg.model.D_table) dt.push_back(matrix_json(blk));
    for (const auto& blk : cfg.model.V_table) vt.push_back(matrix_json(blk));
    m["D_table"] = std::move(dt);
    m["V_table"] = std::move(vt);
  }
  j["model"] = std::move(m);

  j["grid"] = {{"min", cfg.grid.min},
               {"max", cfg.grid.max},
               {"step", cfg.grid.step},
               {"imag", cfg.grid.imag}};

  json names = json::array();
  for (const char* name : kMethodNames)
    if (method_enabled(cfg.methods, name)) names.push_back(name);
  j["methods"] = std::move(names);

  const Resolutions& r = cfg.res;
  j["resolutions"] = {{"base_resolution", r.base_resolution},
                      {"sphere_samples", r.sphere_samples},
                      {"chain_horizon", r.chain_horizon},
                      {"truncation_half_width", r.truncation_half_width},
                      {"bounded_horizon", r.bounded_horizon},
                      {"edge_skin", r.edge_skin},
                      {"growth_slope_tol", r.growth_slope_tol},
                      {"bounded_tol", r.bounded_tol},
                      {"bounded_divergent", r.bounded_divergent},
                      {"certify_eps_ladder", r.certify_eps_ladder},
                      {"certify_r_max", r.certify_r_max},
                      {"herglotz_y_ladder", r.herglotz_y_ladder},
                      {"herglotz_zero_tol", r.herglotz_zero_tol},
                      {"herglotz_divergent_tol", r.herglotz_divergent_tol}};

  j["output"] = {{"path", cfg.output.path}, {"format", cfg.output.format}};
  return j.dump(2) + "\n";
}

uint64_t config_hash(const ScanConfig& cfg) { return fnv1a64(serialize_config(cfg)); }

BaseSystem make_base(const BaseSpec& s) {
  if (s.kind == "rotation") return BaseSystem::rotation(s.alpha, s.minimal);
  if (s.kind == "torus_translation")
    return BaseSystem::torus_translation(s.alpha, s.alpha2, s.minimal);
  if (s.kind == "skew_shift") return BaseSystem::skew_shift(s.alpha, s.minimal);
  if (s.kind == "periodic_cycle") return BaseSystem::periodic_cycle(s.period);
  throw ConfigError("base.kind: unknown base kind '" + s.kind + "'");
}

JacobiFamily make_model(const ScanConfig& cfg) {
  const ModelSpec& m = cfg.model;
  if (m.kind == "free_scalar") return JacobiFamily::free_scalar(make_base(cfg.base));
  if (m.kind == "constant_block")
    return JacobiFamily::constant_block(make_base(cfg.base), to_matrix(m.V0));
  if (m.kind == "scalar_cosine")
    return JacobiFamily::scalar_cosine(make_base(cfg.base), m.amplitude);
  if (m.kind == "matrix_trig")
    return JacobiFamily::matrix_trig(make_base(cfg.base), m.l, m.a, m.b);
  if (m.kind == "periodic_table") {
    std::vector<Eigen::MatrixXd> D, V;
    for (const auto& blk : m.D_table) D.push_back(to_matrix(blk));
    for (const auto& blk : m.V_table) V.push_back(to_matrix(blk));
    return JacobiFamily::periodic_table(std::move(D), std::move(V));
  }
  throw ConfigError("model.kind: unknown model kind '" + m.kind + "'");
}

namespace {

ScanRecord scan_point(const JacobiFamily& f, const ScanConfig& cfg, uint64_t cfg_hash, double x,
                      const Eigen::VectorXd& trunc_eigs,
                      const std::vector<BasePoint>& samples) {
  const Resolutions& r = cfg.res;
  ScanRecord rec;
  rec.x = x;
  const cxd z(x, cfg.grid.imag);
  const uint64_t seed = hash_combine(cfg_hash, std::bit_cast<uint64_t>(x));
  VoteBox box;
  auto note = [&rec](const char* method, const std::exception& e) {
    if (!rec.error.empty()) rec.error += "; ";
    rec.error += std::string(method) + ": " + e.what();
  };

  if (cfg.methods.growth) {
    try {
      const auto g = growth_indicator(f, z, samples, r.chain_horizon, ExecMode::serial);
      rec.lambda_estimate = g.lambda_estimate;
      box.cast(std::log(g.lambda_estimate) >= r.growth_slope_tol ? Vote::resolvent
                                                                 : Vote::spectrum);
    } catch (const std::exception& e) {
      note("growth", e);
    }
  }
  if (cfg.methods.certify) {
    try {
      CertifyOptions opt;
      opt.eps_ladder = r.certify_eps_ladder;
      opt.r_max = r.certify_r_max;
      opt.base_resolution = r.base_resolution;
      opt.sphere_samples = r.sphere_samples;
      opt.bounded_horizon = r.bounded_horizon;
      opt.seed = seed;
      opt.exec = ExecMode::serial;
      const auto rep = ug_certify(f, z, opt);
      rec.cert_verdict = verdict_token(rep.verdict);
      if (!cfg.methods.growth) rec.lambda_estimate = rep.lambda_estimate;
      if (rep.verdict == UGVerdict::certified) box.cast(Vote::resolvent);
      if (rep.verdict == UGVerdict::refuted) box.cast(Vote::spectrum);
    } catch (const std::exception& e) {
      note("certify", e);
    }
  }
  if (cfg.methods.bounded) {
    try {
      const auto b = bounded_orbit_search(f, z, r.base_resolution, r.sphere_samples,
                                          r.bounded_horizon, seed, ExecMode::serial);
      rec.bounded_sup = b.sup_norm;
      if (b.sup_norm <= 1.0 + r.bounded_tol) box.cast(Vote::spectrum);
      else if (b.sup_norm >= r.bounded_divergent) box.cast(Vote::resolvent);
    } catch (const std::exception& e) {
      note("bounded", e);
    }
  }
  if (cfg.methods.truncation) {
    try {
      double nearest = std::numeric_limits<double>::quiet_NaN(), dist = 1e300;
      for (long k = 0; k < trunc_eigs.size(); ++k)
        if (std::abs(x - trunc_eigs[k]) < dist) {
          dist = std::abs(x - trunc_eigs[k]);
          nearest = trunc_eigs[k];
        }
      rec.nearest_truncated_eig = nearest;
      box.cast(dist <= r.edge_skin ? Vote::spectrum : Vote::resolvent);
    } catch (const std::exception& e) {
      note("truncation", e);
    }
  }
  if (cfg.methods.monodromy) {
    try {
      box.cast(periodic_monodromy_oracle(f, z) ? Vote::spectrum : Vote::resolvent);
    } catch (const std::exception& e) {
      note("monodromy", e);
    }
  }
  if (cfg.methods.herglotz) {
    try {
      const auto pts = herglotz_indicator(f, BasePoint{}, x, r.herglotz_y_ladder);
      double limit = std::numeric_limits<double>::quiet_NaN();
      for (const auto& pt : pts)
        if (pt.ok) limit = pt.value;
      rec.herglotz_limit = limit;
      if (pts.back().ok && limit < r.herglotz_zero_tol) box.cast(Vote::resolvent);
      else if (std::isfinite(limit) && limit >= 10.0 * r.herglotz_zero_tol &&
               limit <= r.herglotz_divergent_tol)
        box.cast(Vote::spectrum);
    } catch (const std::exception& e) {
      note("herglotz", e);
    }
  }

  if (box.resolvent && box.spectrum) {
    rec.classification = "undecided";
    rec.disagreement = true;
  } else if (box.resolvent) {
    rec.classification = "resolvent";
  } else if (box.spectrum) {
    rec.classification = "spectrum";
  }
  return rec;
}

}  // namespace

ScanResult scan(const ScanConfig& cfg, ExecMode exec) {
  validate_config(cfg);
  const auto f = make_model(cfg);
  const auto vrep = f.validate(f.base().sample(std::min(cfg.res.base_resolution, 64)));
  if (!vrep.pass) throw ModelError(vrep.detail);
  const uint64_t h = config_hash(cfg);
  const long count = long(std::floor((cfg.grid.max - cfg.grid.min) / cfg.grid.step + 1e-9)) + 1;

  Eigen::VectorXd trunc_eigs;
  if (cfg.methods.truncation) {
    long half = cfg.res.truncation_half_width;
    if (half == 0) half = f.l() == 1 ? 200 : 100;
    trunc_eigs = truncated_spectrum(truncate(f, BasePoint{}, half));
  }
  const auto samples = f.base().sample(cfg.res.base_resolution);

  ScanResult out;
  out.config_hash = h;
  out.records.resize(size_t(count));
  parallel_index(count, exec, [&](long i) {
    out.records[size_t(i)] =
        scan_point(f, cfg, h, cfg.grid.min + double(i) * cfg.grid.step, trunc_eigs, samples);
  });
  for (const auto& rec : out.records)
    if (!rec.error.empty()) out.partial = true;
  return out;
}

std::string scan_csv(const ScanResult& res) {
  std::string s =
      "x,lambda_estimate,cert_verdict,bounded_sup,nearest_truncated_eig,herglotz_limit,"
      "classification\n";
  char buf[64];
  auto num = [&buf](double v) -> std::string {
    if (!std::isfinite(v)) return "";
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  };
  for (const auto& r : res.records) {
    s += num(r.x) + ',' + num(r.lambda_estimate) + ',' + r.cert_verdict + ',' +
         num(r.bounded_sup) + ',' + num(r.nearest_truncated_eig) + ',' + num(r.herglotz_limit) +
         ',' + r.classification + '\n';
  }
  return s;
}

std::string scan_json(const ScanResult& res) {
  json j;
  j["config_hash"] = res.config_hash;
  json recs = json::array();
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  for (const auto& r : res.records) {
    json o;
    o["x"] = r.x;
    o["lambda_estimate"] = num(r.lambda_estimate);
    o["cert_verdict"] = r.cert_verdict;
    o["bounded_sup"] = num(r.bounded_sup);
    o["nearest_truncated_eig"] = num(r.nearest_truncated_eig);
    o["herglotz_limit"] = num(r.herglotz_limit);
    o["classification"] = r.classification;
    o["disagreement"] = r.disagreement;
    o["error"] = r.error;
    recs.push_back(std::move(o));
  }
  j["records"] = std::move(recs);
  return j.dump(2) + "\n";
}

void export_scan(const ScanResult& res, const std::string& format, const std::string& path) {
  if (format != "csv" && format != "json")
    throw ConfigError("output.format: must be csv or json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("export: cannot open '" + path + "' for writing");
  out << (format == "csv" ? scan_csv(res) : scan_json(res));
  out.flush();
  if (!out) throw std::runtime_error("export: failed writing '" + path + "'");
}

}  // namespace ugscan
