#include "singcert/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "singcert/catalog.hpp"
#include "singcert/certified_implicit.hpp"
#include "singcert/certified_inverse.hpp"
#include "singcert/error.hpp"
#include "singcert/morse.hpp"
#include "singcert/rank_charts.hpp"
#include "singcert/splitting.hpp"

#ifndef SINGCERT_VERSION
#define SINGCERT_VERSION "0.0.0"
#endif

namespace singcert {

using json = nlohmann::ordered_json;

namespace {

struct RunConfig {
  std::string command;
  std::string target;
  std::string fn;
  std::string catalog;
  std::size_t n = 0;
  std::string at;
  int k = 0;
  int grid = 0;
  std::optional<double> tol;
  unsigned long long seed = 1;
  double c_entropy = 1.0;
  double eps = 0.5;
  std::optional<double> K;
  double radius = 1.0;
  std::size_t m = 0;
  std::size_t p = 0;
  std::size_t samples = 1000;
  std::string perturb;
  std::string json_path;
  std::string csv_path;
};

// Resolved inputs shared by every command.
struct Problem {
  OraclePtr f;
  std::size_t n = 0;
  Vector at;
  int k = 0;
  CkNormBound kbound;
  std::string K_source;
};

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json vec(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json mat(const Matrix& m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i)));
  return a;
}

json indices(const std::vector<std::size_t>& v) { return json(v); }

json checks_json(const VerificationReport& r) {
  json out = {{"passed", r.passed()}, {"checks", json::array()}};
  for (const auto& c : r.checks) {
    json j = {{"name", c.name},      {"passed", c.passed},  {"worst", num(c.worst)},
              {"threshold", num(c.threshold)}, {"kind", c.lower_bound ? "lower_bound" : "upper_bound"},
              {"samples", c.samples}};
    if (!c.witness.empty()) j["witness"] = vec(c.witness);
    if (!c.note.empty()) j["note"] = c.note;
    out["checks"].push_back(j);
  }
  return out;
}

json critical_json(const std::vector<CriticalPoint>& cps) {
  json a = json::array();
  for (const auto& c : cps)
    a.push_back({{"location", vec(c.location)}, {"value", num(c.value)}, {"sigma_n", num(c.sigma_n)},
                 {"morse_index", c.morse_index}});
  return a;
}

json config_json(const RunConfig& c, const Problem* p) {
  json j = {{"command", c.command}, {"target", c.target}};
  j["fn"] = c.fn;
  if (!c.catalog.empty()) j["catalog"] = c.catalog;
  if (p) {
    j["n"] = p->n;
    j["at"] = vec(p->at);
    j["k"] = p->k;
    j["K"] = num(p->kbound.value);
    j["K_source"] = p->K_source;
  }
  j["grid"] = c.grid;
  j["tol"] = c.tol ? num(*c.tol) : json("default");
  j["seed"] = c.seed;
  j["c_entropy"] = num(c.c_entropy);
  j["eps"] = num(c.eps);
  j["radius"] = num(c.radius);
  j["m"] = c.m;
  j["p"] = c.p;
  j["samples"] = c.samples;
  if (!c.perturb.empty()) j["perturb"] = c.perturb;
  return j;
}

std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

Vector parse_point(const std::string& text) {
  Vector v;
  if (text.empty()) return v;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::Parse, "bad coordinate '" + item + "' in --at");
    }
  }
  return v;
}

std::size_t infer_dimension(const std::string& fn) {
  static const std::regex var("x([0-9]+)");
  std::size_t n = 0;
  for (auto it = std::sregex_iterator(fn.begin(), fn.end(), var); it != std::sregex_iterator(); ++it)
    n = std::max<std::size_t>(n, std::stoul((*it)[1]));
  return n;
}

int default_k(const RunConfig& c) {
  if (c.command == "morse" || c.target == "split") return 3;
  return 2;
}

int default_grid(std::size_t n) { return n == 1 ? 401 : n == 2 ? 41 : n == 3 ? 15 : 9; }

Problem resolve(RunConfig& c) {
  if (!c.catalog.empty()) {
    const CatalogEntry& e = find_catalog(c.catalog);
    c.fn = e.fn;
    if (c.n == 0) c.n = e.n;
    if (c.at.empty() && !e.at.empty()) {
      std::ostringstream s;
      for (std::size_t i = 0; i < e.at.size(); ++i) s << (i ? "," : "") << format_double(e.at[i]);
      c.at = s.str();
    }
    if (c.m == 0) c.m = e.m;
    if (c.p == 0) c.p = e.p;
  }
  if (c.fn.empty()) throw Error(ErrorCode::InvalidArgument, "one of --fn or --catalog is required");
  Problem p;
  p.at = parse_point(c.at);
  p.n = c.n ? c.n : std::max(p.at.size(), infer_dimension(c.fn));
  if (p.n == 0) throw Error(ErrorCode::InvalidArgument, "cannot infer the input dimension; pass --n");
  if (p.at.empty()) p.at.assign(p.n, 0.0);
  if (p.at.size() != p.n) throw Error(ErrorCode::InvalidArgument, "--at has the wrong number of coordinates");
  p.f = parse_oracle(c.fn, p.n);
  p.k = c.k > 0 ? c.k : default_k(c);
  const Vector center = c.command == "morse" ? Vector(p.n, 0.0) : p.at;
  const double radius = c.command == "morse" ? 1.0 : c.radius;
  if (c.K) {
    p.kbound.value = *c.K;
    p.kbound.order = p.k;
    p.kbound.ball = Ball{center, radius};
    p.K_source = "user";
  } else {
    p.kbound = estimate_ck_norm(*p.f, Ball{center, radius}, p.k, c.grid > 0 ? c.grid : default_grid(p.n));
    p.K_source = "sampled";
  }
  return p;
}

json inverse_json(const InverseCertificate& c) {
  json j = {{"x0", vec(c.x0)}, {"K", num(c.K)}, {"delta", num(c.delta)}, {"r", num(c.r)}, {"rho1", num(c.rho1)},
            {"rho2", num(c.rho2)}, {"lip_inverse", num(c.lip_inverse)}, {"k", c.k}, {"fx0", vec(c.fx0)}};
  if (c.ck_inverse) j["ck_inverse"] = num(*c.ck_inverse);
  if (c.ck_inverse_from_one) j["ck_inverse_from_one"] = num(*c.ck_inverse_from_one);
  return j;
}

json implicit_json(const ImplicitCertificate& c) {
  json j = {{"x0", vec(c.x0)},       {"y0", vec(c.y0)},       {"K", num(c.K)},
            {"delta", num(c.delta)}, {"r", num(c.r)},         {"rho", num(c.rho)},
            {"lip_g", num(c.lip_g)}, {"k", c.k},              {"partial_inv_norm", num(c.partial_inv_norm)}};
  if (c.ck_g) j["ck_g"] = num(*c.ck_g);
  return j;
}

json rank_json(const RankCertificate& c) {
  return {{"x0", vec(c.x0)},         {"p", c.p},
          {"K", num(c.K)},           {"delta", num(c.delta)},
          {"r", num(c.r)},           {"rho1", num(c.rho1)},
          {"rho2", num(c.rho2)},     {"lip_phi", num(c.lip_phi)},
          {"lip_phi_inverse", num(c.lip_phi_inv)}, {"lip_psi", num(c.lip_psi)},
          {"ck_phi", num(c.ck_phi)}, {"ck_psi", num(c.ck_psi)},
          {"k", c.k},                {"block_inv_norm", num(c.block_inv_norm)},
          {"rows", indices(c.rows)}, {"cols", indices(c.cols)}};
}

json split_json(const SplitCertificate& c) {
  return {{"x0", vec(c.x0)},
          {"n", c.n},
          {"p", c.p},
          {"signs", vec(c.signs)},
          {"K", num(c.K)},
          {"sigma_p", num(c.sigma_p)},
          {"delta", num(c.delta)},
          {"delta_theorem", num(c.delta_theorem)},
          {"delta_internal", num(c.delta_internal)},
          {"delta1", num(c.delta1)},
          {"delta2", num(c.delta2)},
          {"delta3", num(c.delta3)},
          {"r3", num(c.r3)},
          {"implicit_r", num(c.implicit_r)},
          {"kbar", num(c.kbar)},
          {"dphi_bound", num(c.dphi_bound)},
          {"ck_phi_bound", num(c.ck_phi_bound)},
          {"k", c.k},
          {"fx0", num(c.fx0)},
          {"rotation", mat(c.rotation)}};
}

json density_json(const DensityConstants& d) {
  return {{"K", num(d.K)},       {"n", d.n},
          {"k", d.k},            {"epsilon", num(d.epsilon)},
          {"c", num(d.c)},       {"Rk", num(d.Rk)},
          {"r", num(d.r)},       {"gamma", num(d.gamma)},
          {"d", num(d.d)},       {"N", num(d.N)},
          {"eta1", num(d.eta1)}, {"eta", num(d.eta)},
          {"psi1", num(d.psi1)}, {"psi2", num(d.psi2)},
          {"psi3_cap", num(d.psi3_cap)}, {"C1", num(d.C1)},
          {"entropy", num(d.entropy)}, {"measure_condition", d.measure_condition}};
}

json morse_cert_json(const MorseCertificate& c) {
  return {{"critical_points", critical_json(c.critical_points)},
          {"K", num(c.K)},
          {"k", c.k},
          {"gamma", num(c.gamma)},
          {"d", num(c.d)},
          {"boundary_distance", num(c.boundary_distance)},
          {"rho", num(c.rho)},
          {"eta", num(c.eta)},
          {"epsilon", num(c.epsilon)},
          {"grid_density", c.grid_density},
          {"grid_step", num(c.grid_step)}};
}

std::size_t split_m(const RunConfig& c, const Problem& p) {
  const std::size_t dims_out = p.f->dims_out();
  if (c.m) return c.m;
  if (dims_out >= p.n) throw Error(ErrorCode::InvalidArgument, "implicit needs more inputs than equations; pass --m");
  return p.n - dims_out;
}

std::size_t rank_p(const RunConfig& c, const Problem& p) {
  if (c.p) return c.p;
  return numerical_rank(p.f->jacobian(p.at), c.tol.value_or(1e-8));
}

// Fills result / verification; returns the exit code.
int run_bounds_or_verify(RunConfig& c, Problem& p, json& report) {
  const bool verify = c.command == "verify";
  if (c.target == "inverse") {
    const auto cert = smooth_inverse_certificate(*p.f, p.at, p.kbound, p.k);
    report["result"] = inverse_json(cert);
    if (verify) {
      InverseVerifyOptions o;
      o.pairs = 10 * c.samples;
      o.targets = c.samples;
      o.variation_samples = 2 * c.samples;
      o.seed = c.seed;
      report["verification"] = checks_json(verify_inverse(*p.f, cert, o));
    }
  } else if (c.target == "implicit") {
    const std::size_t m = split_m(c, p);
    const Vector x0(p.at.begin(), p.at.begin() + m), y0(p.at.begin() + m, p.at.end());
    const auto cert = smooth_implicit_certificate(*p.f, m, x0, y0, p.kbound, p.k);
    report["result"] = implicit_json(cert);
    report["result"]["m"] = m;
    if (verify) {
      ImplicitVerifyOptions o;
      o.points = c.samples;
      o.pairs = 2 * c.samples;
      o.seed = c.seed;
      report["verification"] = checks_json(verify_implicit(*p.f, cert, o));
    }
  } else if (c.target == "rank") {
    RankOptions ro;
    if (c.tol) ro.rank_tol = *c.tol;
    const auto cert = rank_certificate(*p.f, p.at, rank_p(c, p), p.kbound, p.k, ro);
    report["result"] = rank_json(cert);
    if (verify) {
      RankVerifyOptions o;
      o.samples = c.samples;
      o.pairs = c.samples;
      o.seed = c.seed;
      report["verification"] = checks_json(verify_rank(*p.f, StraighteningCharts(p.f, cert), o));
    }
  } else if (c.target == "split") {
    SplitOptions so;
    if (c.tol) so.rank_tol = *c.tol;
    const SplitChart chart = build_split_chart(p.f, p.at, p.kbound, p.k, so);
    report["result"] = split_json(chart.certificate());
    if (verify) {
      SplitVerifyOptions o;
      o.samples = c.samples;
      o.seed = c.seed;
      report["verification"] = checks_json(verify_split(*p.f, chart, o));
    }
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown target '" + c.target + "'");
  }
  if (verify && !report["verification"]["passed"].get<bool>()) return ExitFailed;
  return ExitOk;
}

int run_morse(RunConfig& c, Problem& p, json& report) {
  if (p.f->dims_out() != 1) throw Error(ErrorCode::InvalidArgument, "morse commands need a scalar function");
  CriticalSearchOptions search;
  if (c.tol) search.gradient_tol = *c.tol;
  if (c.target == "analyze") {
    const auto cps = find_critical_points(*p.f, search);
    bool morse = true;
    std::vector<double> values;
    for (const auto& cp : cps) {
      if (!(cp.sigma_n > 1e-9)) morse = false;
      values.push_back(cp.value);
    }
    double gap = INFINITY;
    for (std::size_t i = 0; i < values.size(); ++i)
      for (std::size_t j = i + 1; j < values.size(); ++j) gap = std::min(gap, std::abs(values[i] - values[j]));
    report["result"] = {{"critical_points", critical_json(cps)},
                        {"count", cps.size()},
                        {"nondegenerate", morse},
                        {"min_value_gap", num(gap)},
                        {"search_density", search.grid_density ? search.grid_density : default_search_density(p.n)}};
    return ExitOk;
  }
  if (c.target == "certify" || c.target == "check-openness") {
    const auto cert = openness_certificate(*p.f, p.kbound, find_critical_points(*p.f, search));
    report["result"] = morse_cert_json(cert);
    if (c.target == "certify") return ExitOk;
    if (c.perturb.empty()) throw Error(ErrorCode::InvalidArgument, "check-openness needs --perturb");
    auto fbar = std::make_shared<SumOracle>(std::vector<OraclePtr>{p.f, parse_oracle(c.perturb, p.n)}, Vector{1.0, 1.0});
    OpennessVerifyOptions o;
    o.search = search;
    report["verification"] = checks_json(verify_openness(*p.f, *fbar, cert, o));
    return report["verification"]["passed"].get<bool>() ? ExitOk : ExitFailed;
  }
  if (c.target == "perturb") {
    const auto pert = perturb_to_morse(p.f, p.kbound, c.eps, c.c_entropy, c.seed);
    json centers = json::array();
    for (const auto& x : pert.centers) centers.push_back(vec(x));
    report["result"] = {{"constants", density_json(pert.constants)},
                        {"tilt", vec(pert.tilt)},
                        {"bump_centers", centers},
                        {"bump_coefficients", vec(pert.coefficients)},
                        {"tries", pert.tries},
                        {"h_norm", num(pert.h_norm)},
                        {"critical_points", critical_json(pert.critical_points)}};
    report["verification"] = checks_json(pert.report);
    report["result"]["morse"] = pert.report.passed();
    return pert.report.passed() ? ExitOk : ExitFailed;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown morse subcommand '" + c.target + "'");
}

void flatten(const json& j, const std::string& prefix, std::ostream& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      flatten(*it, key, out);
    } else if (!it->is_array()) {
      out << key << "," << (it->is_string() ? it->get<std::string>() : it->dump()) << "\n";
    }
  }
}

int run_catalog(std::ostream& out) {
  json a = json::array();
  for (const auto& e : catalog())
    a.push_back({{"name", e.name}, {"kind", std::string(to_string(e.kind))}, {"fn", e.fn}, {"n", e.n}, {"at", vec(e.at)}});
  out << a.dump(2) << "\n";
  return ExitOk;
}

}  // namespace

const char* library_version() { return SINGCERT_VERSION; }

std::string strip_timestamp(const std::string& report) {
  json j = json::parse(report);
  j.erase("timestamp");
  return j.dump(2);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"singcert: certified bounds for inverse, implicit, rank, splitting and Morse theorems", "singcert"};
  app.require_subcommand(1);
  auto add_common = [&c](CLI::App* sub) {
    sub->add_option("--fn", c.fn, "polynomial expression in x1..xn, components separated by ';'");
    sub->add_option("--catalog", c.catalog, "catalog entry name");
    sub->add_option("--n", c.n, "input dimension (default: inferred)");
    sub->add_option("--at", c.at, "base point, comma separated");
    sub->add_option("--k", c.k, "smoothness order");
    sub->add_option("--grid", c.grid, "grid density per axis for the sampled C^k norm");
    sub->add_option("--tol", c.tol, "rank tolerance, or gradient tolerance for morse");
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--c-entropy", c.c_entropy, "entropy constant c(n, k)");
    sub->add_option("--eps", c.eps, "perturbation size for morse perturb");
    sub->add_option("--K", c.K, "C^k norm bound (default: sampled)");
    sub->add_option("--radius", c.radius, "ball radius for the sampled C^k norm");
    sub->add_option("--m", c.m, "implicit: number of x variables");
    sub->add_option("--p", c.p, "rank: expected rank");
    sub->add_option("--samples", c.samples, "verification sample count");
    sub->add_option("--perturb", c.perturb, "check-openness: expression added to f");
    sub->add_option("--json", c.json_path, "write the report to this path");
    sub->add_option("--csv", c.csv_path, "write scalar report fields to this path");
  };
  for (auto name : {"bounds", "verify", "morse"}) {
    auto* sub = app.add_subcommand(name);
    const bool morse = std::string(name) == "morse";
    sub->add_option("target", c.target, morse ? "analyze | certify | perturb | check-openness" : "inverse | implicit | rank | split")
        ->required()
        ->check(morse ? CLI::IsMember({"analyze", "certify", "perturb", "check-openness"})
                      : CLI::IsMember({"inverse", "implicit", "rank", "split"}));
    add_common(sub);
  }
  app.add_subcommand("catalog", "list catalog entries");

  std::vector<const char*> argv{"singcert"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ExitOk : ExitUsage;
  }
  if (app.got_subcommand("catalog")) return run_catalog(out);
  c.command = app.get_subcommands().front()->get_name();

  json report;
  report["schema"] = "singcert-report/1";
  report["version"] = library_version();
  report["timestamp"] = timestamp();
  report["config"] = config_json(c, nullptr);
  json warnings = json::array();
  int code = ExitOk;
  try {
    Problem p = resolve(c);
    report["config"] = config_json(c, &p);
    if (p.K_source == "sampled")
      warnings.push_back("K is a sampled estimate of the C^k norm, not a certified bound");
    if (c.command == "morse" && c.target == "perturb")
      warnings.push_back("density constants scale with the entropy constant c = " + format_double(c.c_entropy));
    code = c.command == "morse" ? run_morse(c, p, report) : run_bounds_or_verify(c, p, report);
    report["status"] = code == ExitOk ? "ok" : "failed";
  } catch (const Error& e) {
    const bool refusal = is_refusal(e.code());
    code = refusal ? ExitRefused : e.code() == ErrorCode::Parse || e.code() == ErrorCode::UnknownVariable ||
                                           e.code() == ErrorCode::BadExponent ||
                                           e.code() == ErrorCode::UnknownCatalogEntry ||
                                           e.code() == ErrorCode::InvalidArgument
                                       ? ExitUsage
                                       : ExitFailed;
    report["status"] = refusal ? "refused" : "error";
    report["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    err << "singcert: " << e.what() << "\n";
  }
  report["warnings"] = warnings;
  report["exit_code"] = code;

  const std::string text = report.dump(2);
  out << text << "\n";
  if (!c.json_path.empty()) {
    std::ofstream f(c.json_path);
    if (!f) {
      err << "singcert: cannot write " << c.json_path << "\n";
      return ExitUsage;
    }
    f << text << "\n";
  }
  if (!c.csv_path.empty()) {
    std::ofstream f(c.csv_path);
    if (!f) {
      err << "singcert: cannot write " << c.csv_path << "\n";
      return ExitUsage;
    }
    f << "field,value\n";
    json flat = report;
    flat.erase("timestamp");
    flatten(flat, "", f);
  }
  return code;
}

}  // namespace singcert
