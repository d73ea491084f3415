#include "dilatlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dilatlab/algebra.hpp"
#include "dilatlab/curves.hpp"
#include "dilatlab/dilation.hpp"
#include "dilatlab/gh.hpp"
#include "dilatlab/ladder.hpp"
#include "dilatlab/metric.hpp"
#include "dilatlab/profiles.hpp"
#include "dilatlab/variational.hpp"

namespace dilatlab {

using nlohmann::json;

// ---------------------------------------------------------------------------
// config

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    // trim
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    auto trim = [](std::string s) {
      const auto sb = s.find_first_not_of(" \t");
      const auto se = s.find_last_not_of(" \t");
      return sb == std::string::npos ? std::string()
                                     : s.substr(sb, se - sb + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (cfg.kv.count(key))
      throw std::invalid_argument("config: duplicate key '" + key + "'");
    cfg.kv[key] = value;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const std::string& ExperimentConfig::kind() const {
  const auto it = kv.find("kind");
  if (it == kv.end())
    throw std::invalid_argument("config: missing key 'kind'");
  return it->second;
}

std::uint64_t ExperimentConfig::seed() const {
  const auto it = kv.find("seed");
  if (it == kv.end()) return 0;
  return std::stoull(it->second);
}

std::string ExperimentConfig::get(const std::string& key,
                                  const std::string& fallback) const {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key,
                                    double fallback) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  std::size_t used = 0;
  const double v = std::stod(it->second, &used);
  if (used != it->second.size())
    throw std::invalid_argument("config: bad number for key '" + key + "'");
  return v;
}

int ExperimentConfig::get_int(const std::string& key, int fallback) const {
  return static_cast<int>(get_double(key, fallback));
}

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> table = {
      {"metric", {"sample_file"}},
      {"groupoid", {"sample_file"}},
      {"gh", {"a_file", "b_file", "mode"}},
      {"axioms", {"structure", "x"}},
      {"tangent", {"space", "x", "mu_net"}},
      {"profile", {"space", "x", "b", "eps", "mu_net"}},
      {"length", {"structure", "x", "y", "nodes", "restarts"}},
      {"rnp", {"structure", "probes"}},
      {"tempered", {"structure", "factor"}},
      {"gamma", {"structure", "x"}},
      {"equivalence", {"structure", "structure2", "x"}},
  };
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  const std::string& k = kind();
  const auto it = allowed_keys().find(k);
  if (it == allowed_keys().end())
    throw std::invalid_argument("config: unknown kind '" + k + "'");
  static const std::set<std::string> common = {"kind", "seed", "tol",
                                              "kmin", "kmax", "tail"};
  for (const auto& [key, value] : kv)
    if (!common.count(key) && !it->second.count(key))
      throw std::invalid_argument("config: unknown key '" + key +
                                  "' for kind '" + k + "'");
}

// ---------------------------------------------------------------------------
// artifacts

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string ladder_csv(const LimitEstimate& est) {
  std::string out = "eps,value,residual\n";
  for (const auto& [eps, value] : est.ladder)
    out += fmt(eps) + "," + fmt(value) + "," + fmt(std::abs(value - est.limit)) +
           "\n";
  return out;
}

std::string pairs_csv(const std::vector<std::pair<double, double>>& rows) {
  std::string out = "eps,value,residual\n";
  for (const auto& [eps, value] : rows)
    out += fmt(eps) + "," + fmt(value) + ",0\n";
  return out;
}

json estimate_json(const LimitEstimate& est) {
  return json{{"limit", est.limit},
              {"rate", est.rate},
              {"oscillation", est.oscillation},
              {"verdict", to_string(est.verdict)}};
}

Ladder ladder_from(const ExperimentConfig& cfg, int kmin, int kmax, int tail) {
  Ladder l;
  l.kmin = cfg.get_int("kmin", kmin);
  l.kmax = cfg.get_int("kmax", kmax);
  l.tail = cfg.get_int("tail", tail);
  if (l.kmin > l.kmax || l.tail < 1)
    throw std::invalid_argument("config: bad ladder keys");
  return l;
}

Point parse_point(const std::string& text, std::size_t dim) {
  std::vector<double> coords;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) coords.push_back(std::stod(item));
  if (coords.size() != dim)
    throw std::invalid_argument("config: point '" + text + "' has " +
                                std::to_string(coords.size()) +
                                " coordinates, expected " +
                                std::to_string(dim));
  return Point(std::move(coords));
}

Point origin(std::size_t dim) { return Point(std::vector<double>(dim, 0.0)); }

std::vector<Point> probe_region(const DilatationStructure& ds,
                                const Point& x) {
  std::vector<Point> region{x};
  for (std::size_t k = 0; k < ds.dim; ++k) {
    Point e = origin(ds.dim);
    e[k] = 1.0;
    region.push_back(x + e);
    region.push_back(x - e);
    region.push_back(x + 0.5 * e);
  }
  if (ds.dim >= 2) {
    Point diag = origin(ds.dim);
    diag[0] = 0.6;
    diag[1] = -0.8;
    region.push_back(x + diag);
  }
  return region;
}

std::vector<SampledCurve> default_battery(const DilatationStructure& ds,
                                          std::size_t nodes = 64) {
  std::vector<SampledCurve> battery;
  const std::size_t dim = ds.dim;
  auto mk = [&](std::function<Point(double)> fn) {
    battery.push_back(SampledCurve::from_function(std::move(fn), nodes, ds.d));
  };
  Point e1 = origin(dim);
  e1[0] = 1.0;
  mk([e1, dim](double t) { return Point(t * e1); });
  mk([e1, dim](double t) {
    Point p = origin(dim);
    p[0] = 0.3 + 0.7 * t;
    return p;
  });
  if (dim >= 2) {
    mk([dim](double t) {
      Point p = origin(dim);
      p[0] = t;
      p[1] = 0.5 * t;
      return p;
    });
    mk([dim](double t) {
      Point p = origin(dim);
      const double a = 2.0 * std::numbers::pi * t;
      p[0] = std::cos(a);
      p[1] = std::sin(a);
      return p;
    });
    mk([dim](double t) {
      Point p = origin(dim);
      const double a = std::numbers::pi * t;
      p[0] = 0.5 * std::cos(a);
      p[1] = 0.5 * std::sin(a);
      return p;
    });
    mk([dim](double t) {
      Point p = origin(dim);
      p[0] = t;
      p[1] = t * t;
      return p;
    });
    mk([dim](double t) {
      Point p = origin(dim);
      p[0] = 1.0 - t;
      p[1] = 0.3 * (1.0 - t) * (1.0 - t);
      return p;
    });
  }
  return battery;
}

SpaceOracle space_by_name(const std::string& name) {
  if (name == "snowflake") return snowflake_space();
  const DilatationStructure ds = make_structure(name);
  const Point lo(std::vector<double>(ds.dim, -2.0));
  const Point hi(std::vector<double>(ds.dim, 2.0));
  return space_from_structure(ds, lo, hi);
}

// ---------------------------------------------------------------------------
// kind handlers: each fills checks and returns overall pass

struct Artifacts {
  const std::string& out_dir;
  std::vector<std::string>& files;
  void csv(const std::string& name, const std::string& content) const {
    const std::string path =
        (std::filesystem::path(out_dir) / name).string();
    write_atomic(path, content);
    files.push_back(path);
  }
};

bool run_metric(const ExperimentConfig& cfg, json& checks, const Artifacts&) {
  const std::string file = cfg.get("sample_file", "");
  if (file.empty())
    throw std::invalid_argument("config: kind=metric needs sample_file");
  const FiniteSample sample = FiniteSample::load(file);
  const MetricReport rep =
      verify_metric(sample, cfg.get_double("tol", kDefaultMetricTol));
  json witnesses = json::array();
  for (const MetricViolation& w : rep.witnesses)
    witnesses.push_back(json{{"axiom", to_string(w.axiom)},
                             {"i", w.i},
                             {"j", w.j},
                             {"k", w.k},
                             {"slack", w.slack}});
  checks.push_back(json{{"name", "metric_axioms"},
                        {"pass", rep.pass},
                        {"violations", rep.total_violations},
                        {"witnesses", witnesses}});
  return rep.pass;
}

bool run_groupoid(const ExperimentConfig& cfg, json& checks, const Artifacts&) {
  const std::string file = cfg.get("sample_file", "");
  if (file.empty())
    throw std::invalid_argument("config: kind=groupoid needs sample_file");
  const FiniteSample sample = FiniteSample::load(file);
  const double tol = cfg.get_double("tol", 1e-9);
  const NormedGroupoid g = trivial_groupoid(sample, tol);
  std::vector<Arrow> arrows;
  const std::size_t n = std::min<std::size_t>(sample.size(), 6);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) arrows.push_back({i, j});
  const GroupoidReport rep = verify_groupoid(g, arrows, sample, tol);
  checks.push_back(json{{"name", "groupoid_axioms"},
                        {"pass", rep.pass},
                        {"max_norm_residual", rep.max_norm_residual},
                        {"max_fiber_distortion", rep.max_fiber_distortion},
                        {"max_translation_residual",
                         rep.max_translation_residual},
                        {"skipped_non_composable", rep.skipped_non_composable}});
  return rep.pass;
}

bool run_gh(const ExperimentConfig& cfg, json& checks, const Artifacts&) {
  const std::string a = cfg.get("a_file", ""), b = cfg.get("b_file", "");
  if (a.empty() || b.empty())
    throw std::invalid_argument("config: kind=gh needs a_file and b_file");
  GhConfig gc;
  const std::string mode = cfg.get("mode", "exact");
  if (mode == "exact")
    gc.mode = GhMode::exact;
  else if (mode == "heuristic")
    gc.mode = GhMode::heuristic;
  else
    throw std::invalid_argument("config: mode must be exact or heuristic");
  gc.seed = cfg.seed();
  const GhResult r = gh_distance(FiniteSample::load(a), FiniteSample::load(b), gc);
  json relation = json::array();
  for (auto [i, j] : r.relation.pairs) relation.push_back(json::array({i, j}));
  checks.push_back(json{
      {"name", "gh_distance"},
      {"pass", true},
      {"mu", r.mu},
      {"upper_bound_only", r.upper_bound_only},
      {"relation", relation},
      {"breakdown",
       json{{"dom_covering_radius", r.breakdown.dom_covering_radius},
            {"im_covering_radius", r.breakdown.im_covering_radius},
            {"distortion", r.breakdown.distortion},
            {"base_pair_present", r.breakdown.base_pair_present}}}});
  return true;
}

bool run_axioms(const ExperimentConfig& cfg, json& checks,
                const Artifacts& art) {
  const DilatationStructure ds =
      make_structure(cfg.get("structure", "euclidean:k=2"));
  const Point x = cfg.has("x") ? parse_point(cfg.kv.at("x"), ds.dim)
                               : origin(ds.dim);
  const Ladder ladder = ladder_from(cfg, 1, 20, 5);
  const double tol = cfg.get_double("tol", 1e-9);
  const std::vector<Point> region = probe_region(ds, x);
  bool all = true;
  for (AxiomTag tag : {AxiomTag::A0, AxiomTag::A1, AxiomTag::A2, AxiomTag::A3,
                       AxiomTag::A4, AxiomTag::A4plus}) {
    const AxiomReport rep = check_axiom(ds, tag, region, ladder, tol);
    json entry{{"name", "axiom_" + to_string(tag)},
               {"pass", rep.pass},
               {"residual", rep.residual}};
    if (rep.has_estimate) {
      entry["estimate"] = estimate_json(rep.estimate);
      art.csv("axiom_" + to_string(tag) + ".csv", ladder_csv(rep.estimate));
    }
    checks.push_back(entry);
    all = all && rep.pass;
  }
  return all;
}

bool run_tangent(const ExperimentConfig& cfg, json& checks,
                 const Artifacts& art) {
  const SpaceOracle space = space_by_name(cfg.get("space", "euclidean:k=2"));
  const Point x = cfg.has("x") ? parse_point(cfg.kv.at("x"), space.dim)
                               : origin(space.dim);
  const Ladder ladder = ladder_from(cfg, 1, 6, 3);
  const double mu_net = cfg.get_double("mu_net", 0.1);
  const TangentReport rep =
      tangent_existence(space, x, ladder, mu_net, cfg.seed());
  art.csv("tangent_residuals.csv", pairs_csv(rep.residuals));
  json residuals = json::array();
  for (const auto& [eps, mu] : rep.residuals)
    residuals.push_back(json::array({eps, mu}));
  checks.push_back(json{{"name", "tangent_existence"},
                        {"pass", rep.exists},
                        {"threshold", rep.threshold},
                        {"residuals", residuals}});
  return rep.exists;
}

bool run_profile(const ExperimentConfig& cfg, json& checks, const Artifacts&) {
  const SpaceOracle space = space_by_name(cfg.get("space", "euclidean:k=2"));
  const Point x = cfg.has("x") ? parse_point(cfg.kv.at("x"), space.dim)
                               : origin(space.dim);
  const double b = cfg.get_double("b", 1.0);
  const double eps = cfg.get_double("eps", 0.5);
  const double mu_net = cfg.get_double("mu_net", 0.1);
  const double mu = profile_consistency(space, x, b, eps, mu_net, cfg.seed());
  const bool pass = std::isfinite(mu);
  checks.push_back(json{{"name", "profile_consistency"},
                        {"pass", pass},
                        {"gh", mu},
                        {"b", b},
                        {"eps", eps},
                        {"mu_net", mu_net}});
  return pass;
}

bool run_length(const ExperimentConfig& cfg, json& checks, const Artifacts&) {
  const DilatationStructure ds =
      make_structure(cfg.get("structure", "euclidean:k=2"));
  const Point x = parse_point(cfg.get("x", "0,0"), ds.dim);
  const Point y = parse_point(cfg.get("y", "1,0"), ds.dim);
  PolylineConfig pc;
  pc.interior_nodes = cfg.get_int("nodes", 16);
  pc.restarts = cfg.get_int("restarts", 2);
  pc.seed = cfg.seed() + 1;
  const PolylineResult r = length_distance(ds.d, x, y, pc);
  checks.push_back(json{{"name", "length_distance"},
                        {"pass", r.feasible},
                        {"value", r.value},
                        {"direct", ds.d(x, y)}});
  return r.feasible;
}

bool run_rnp(const ExperimentConfig& cfg, json& checks, const Artifacts&) {
  const DilatationStructure ds =
      make_structure(cfg.get("structure", "euclidean:k=2"));
  const Ladder ladder = ladder_from(cfg, 1, 20, 5);
  const RnpReport rep = rnp_probe(ds, default_battery(ds),
                                  cfg.get_int("probes", 8), ladder);
  const bool pass = rep.fraction >= 0.99;
  checks.push_back(json{{"name", "rnp_fraction"},
                        {"pass", pass},
                        {"fraction", rep.fraction},
                        {"probes", rep.probes},
                        {"derivable", rep.derivable}});
  return pass;
}

bool run_tempered(const ExperimentConfig& cfg, json& checks, const Artifacts&) {
  const DilatationStructure ds =
      make_structure(cfg.get("structure", "euclidean:k=2"));
  const Ladder ladder = ladder_from(cfg, 1, 12, 5);
  const double factor = cfg.get_double("factor", 1.0);
  const DistanceOracle d = factor == 1.0 ? ds.d : ds.d.rescaled(1.0 / factor);
  const TemperedReport rep =
      tempered_probe(ds, d, probe_region(ds, origin(ds.dim)), ladder);
  checks.push_back(json{{"name", "tempered"},
                        {"pass", rep.tempered},
                        {"c_hat", rep.c_hat},
                        {"C_hat", rep.C_hat},
                        {"skipped", rep.skipped}});
  return rep.tempered;
}

bool run_gamma(const ExperimentConfig& cfg, json& checks, const Artifacts&) {
  const DilatationStructure ds =
      make_structure(cfg.get("structure", "euclidean:k=2"));
  const Point x = cfg.has("x") ? parse_point(cfg.kv.at("x"), ds.dim)
                               : origin(ds.dim);
  const Ladder ladder = ladder_from(cfg, 1, 16, 5);
  std::vector<SampledCurve> battery;
  for (const SampledCurve& c : default_battery(ds, 48))
    battery.push_back(c);
  const GammaReport rep =
      gamma_probe(ds, x, battery, ladder.scales(), cfg.get_double("tol", 1e-3));
  json slacks = json::array();
  for (double s : rep.liminf_slacks) slacks.push_back(s);
  checks.push_back(json{{"name", "gamma"},
                        {"pass", rep.pass},
                        {"liminf_slacks", slacks},
                        {"dropped", rep.dropped},
                        {"dsup_margin", rep.dsup_margin}});
  return rep.pass;
}

bool run_equivalence(const ExperimentConfig& cfg, json& checks,
                     const Artifacts&) {
  const DilatationStructure ds1 =
      make_structure(cfg.get("structure", "euclidean:k=2"));
  const DilatationStructure ds2 =
      make_structure(cfg.get("structure2", "euclidean:k=2"));
  if (ds1.dim != ds2.dim)
    throw std::invalid_argument("config: structures have mismatched dimension");
  const Point x = cfg.has("x") ? parse_point(cfg.kv.at("x"), ds1.dim)
                               : origin(ds1.dim);
  const Ladder ladder = ladder_from(cfg, 1, 20, 5);
  std::vector<Point> samples;
  for (std::size_t k = 0; k < ds1.dim; ++k) {
    Point e = origin(ds1.dim);
    e[k] = 1.0;
    samples.push_back(x + e);
    samples.push_back(x - 0.5 * e);
  }
  const EquivalenceReport rep = equivalence_probe(ds1, ds2, x, samples, ladder);
  checks.push_back(json{{"name", "equivalence"},
                        {"pass", rep.equivalent},
                        {"isoequiv_residual", rep.isoequiv_residual}});
  return rep.equivalent;
}

}  // namespace

RunResult run(const ExperimentConfig& config, const std::string& out_dir) {
  RunResult result;
  json report;
  report["schema"] = 1;
  report["config"] = json(config.kv);
  try {
    config.validate();
    const std::string dir = out_dir.empty() ? "." : out_dir;
    std::filesystem::create_directories(dir);
    Artifacts art{dir, result.artifacts};
    json checks = json::array();
    const std::string& kind = config.kind();
    bool pass = false;
    if (kind == "metric") pass = run_metric(config, checks, art);
    else if (kind == "groupoid") pass = run_groupoid(config, checks, art);
    else if (kind == "gh") pass = run_gh(config, checks, art);
    else if (kind == "axioms") pass = run_axioms(config, checks, art);
    else if (kind == "tangent") pass = run_tangent(config, checks, art);
    else if (kind == "profile") pass = run_profile(config, checks, art);
    else if (kind == "length") pass = run_length(config, checks, art);
    else if (kind == "rnp") pass = run_rnp(config, checks, art);
    else if (kind == "tempered") pass = run_tempered(config, checks, art);
    else if (kind == "gamma") pass = run_gamma(config, checks, art);
    else if (kind == "equivalence") pass = run_equivalence(config, checks, art);
    report["checks"] = checks;
    report["pass"] = pass;
    result.exit_code = pass ? 0 : 1;
    const std::string path =
        (std::filesystem::path(dir) / "report.json").string();
    write_atomic(path, report.dump(2) + "\n");
    result.artifacts.push_back(path);
  } catch (const std::invalid_argument& e) {
    report["error"] = e.what();
    result.exit_code = 2;
  } catch (const std::length_error& e) {
    report["error"] = e.what();
    result.exit_code = 2;
  }
  result.report = report;
  return result;
}

}  // namespace dilatlab
