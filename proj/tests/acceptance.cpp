// Acceptance criteria: one PASS/FAIL line each. --only N runs a single one.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "singcert/catalog.hpp"
#include "singcert/certified_implicit.hpp"
#include "singcert/certified_inverse.hpp"
#include "singcert/cli.hpp"
#include "singcert/error.hpp"
#include "singcert/morse.hpp"
#include "singcert/rank_charts.hpp"
#include "singcert/splitting.hpp"

using namespace singcert;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

int grid_for(std::size_t n) { return n == 1 ? 401 : n == 2 ? 41 : n == 3 ? 15 : 9; }

CkNormBound bound_at(const JetOracle& f, const Vector& center, int k) {
  return estimate_ck_norm(f, Ball{center, 1.0}, k, grid_for(f.dims_in()));
}

std::string failed_checks(const VerificationReport& r) {
  std::string s;
  for (const auto& c : r.checks)
    if (!c.passed) s += (s.empty() ? "" : ",") + c.name + "=" + fmt(c.worst) + " vs " + fmt(c.threshold);
  return s;
}

Outcome criterion_bounds() {
  Outcome o;
  const double e = compose_bound(2, 3, 2), ei = inverse_bound(2, 3, 2);
  if (e != 60) o.fail("E(2,3,2) = " + fmt(e));
  if (ei != 54) o.fail("EI(2,3,2) = " + fmt(ei));
  std::size_t violations = 0;
  for (int k = 1; k <= 4; ++k)
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) {
        const double a = 0.5 + 0.5 * i, b = 0.5 + 0.5 * j;
        if (i + 1 < 10 && compose_bound(a + 0.5, b, k) < compose_bound(a, b, k)) ++violations;
        if (j + 1 < 10 && compose_bound(a, b + 0.5, k) < compose_bound(a, b, k)) ++violations;
        if (i + 1 < 10 && inverse_bound(a + 0.5, b, k) < inverse_bound(a, b, k)) ++violations;
        if (j + 1 < 10 && inverse_bound(a, b + 0.5, k) < inverse_bound(a, b, k)) ++violations;
      }
  if (violations) o.fail(std::to_string(violations) + " monotonicity violations");
  o.detail = "E(2,3,2)=" + fmt(e) + ", EI(2,3,2)=" + fmt(ei) + ", 10x10 sweep k=1..4" + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion_inverse() {
  Outcome o;
  const auto entries = catalog_of(CatalogKind::Inverse);
  for (const auto& e : entries) {
    const auto f = oracle_of(e);
    try {
      const auto cert = smooth_inverse_certificate(*f, e.at, bound_at(*f, e.at, 2), 2);
      InverseVerifyOptions opt;
      opt.pairs = 10000;
      opt.targets = 1000;
      const auto rep = verify_inverse(*f, cert, opt);
      if (!rep.passed()) o.fail(e.name + ": " + failed_checks(rep));
    } catch (const Error& err) {
      o.fail(e.name + ": " + err.what());
    }
  }
  if (o.pass) o.detail = std::to_string(entries.size()) + " maps, 1e4 pairs and 1e3 targets each";
  return o;
}

Outcome criterion_implicit() {
  Outcome o;
  const auto entries = catalog_of(CatalogKind::Implicit);
  double worst_res = 0, worst_lip = 0, worst_der = 0;
  for (const auto& e : entries) {
    const auto F = oracle_of(e);
    try {
      const Vector x0(e.at.begin(), e.at.begin() + e.m), y0(e.at.begin() + e.m, e.at.end());
      const auto cert = smooth_implicit_certificate(*F, e.m, x0, y0, bound_at(*F, e.at, 2), 2);
      ImplicitVerifyOptions opt;
      opt.points = 1000;
      const auto rep = verify_implicit(*F, cert, opt);
      const double res = rep.find("residual").worst, lip = rep.find("lipschitz_g").worst;
      const double der = rep.find("derivative_formula").worst;
      worst_res = std::max(worst_res, res);
      worst_lip = std::max(worst_lip, lip / (cert.K / cert.delta));
      worst_der = std::max(worst_der, der);
      if (!(res <= 1e-10)) o.fail(e.name + ": residual " + fmt(res));
      if (!(lip <= cert.K / cert.delta)) o.fail(e.name + ": Lipschitz modulus " + fmt(lip) + " > K/delta");
      if (!(der <= 1e-6)) o.fail(e.name + ": derivative mismatch " + fmt(der));
    } catch (const Error& err) {
      o.fail(e.name + ": " + err.what());
    }
  }
  if (o.pass)
    o.detail = std::to_string(entries.size()) + " instances; residual " + fmt(worst_res) + ", Lip/(K/delta) " +
               fmt(worst_lip) + ", Dg rel err " + fmt(worst_der);
  return o;
}

Outcome criterion_rank() {
  Outcome o;
  const auto entries = catalog_of(CatalogKind::Rank);
  double nf = 0, vb = 0;
  for (const auto& e : entries) {
    const auto f = oracle_of(e);
    try {
      const auto cert = rank_certificate(*f, e.at, e.p, bound_at(*f, e.at, 2), 2);
      RankVerifyOptions opt;
      opt.samples = 1000;
      const auto rep = verify_rank(*f, StraighteningCharts(f, cert), opt);
      nf = std::max(nf, rep.find("normal_form").worst);
      vb = std::max(vb, rep.find("vanishing_block").worst);
      if (!(rep.find("normal_form").worst <= 1e-9)) o.fail(e.name + ": normal form");
      if (!(rep.find("vanishing_block").worst <= 1e-8)) o.fail(e.name + ": vanishing block");
    } catch (const Error& err) {
      o.fail(e.name + ": " + err.what());
    }
  }
  if (o.pass) o.detail = std::to_string(entries.size()) + " maps; normal form " + fmt(nf) + ", M2 block " + fmt(vb);
  return o;
}

// Symmetric n x n family in two inputs: D0 + scale * (A_1 x1 + A_2 x2 + A_3 x1 x2).
struct RandomFamily {
  Vector signs;
  std::vector<Matrix> a;

  RandomFamily(std::size_t n, std::mt19937_64& rng) : signs(n), a(3, Matrix(n, n)) {
    std::uniform_real_distribution<double> u(-1, 1);
    for (auto& s : signs) s = u(rng) < 0 ? -1.0 : 1.0;
    for (auto& m : a)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = u(rng);
  }

  OraclePtr oracle(double scale) const {
    const std::size_t n = signs.size();
    std::ostringstream s;
    s.precision(17);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i || j) s << "; ";
        s << (i == j ? signs[i] : 0.0) << " + " << scale * a[0](i, j) << "*x1 + " << scale * a[1](i, j) << "*x2 + "
          << scale * a[2](i, j) << "*x1*x2";
      }
    return parse_oracle(s.str(), 2);
  }
};

Outcome criterion_diagonalization() {
  Outcome o;
  std::mt19937_64 rng(2024);
  const auto grid = ball_grid(Ball{{0.0, 0.0}, 1.0}, 41);
  double rec = 0, base = 0, kmax = 0;
  std::size_t families = 0;
  for (std::size_t n = 1; n <= 6; ++n) {
    for (int rep = 0; rep < 3; ++rep) {
      const RandomFamily rf(n, rng);
      // the C^2 norm is linear in the scale; keep Kbar <= 4
      const double unit = sampled_ck_norm(*rf.oracle(1.0), grid, 2);
      const double scale = std::min(1.0, 3.9 / unit);
      const auto fam = rf.oracle(scale);
      const double kbar = sampled_ck_norm(*fam, grid, 2);
      try {
        const auto tf = diagonalize_family(fam, n, kbar, 2);
        FamilyVerifyOptions opt;
        opt.samples = 1000;
        const auto r = verify_family(tf, opt);
        rec = std::max(rec, r.find("reconstruction").worst);
        const double b = (tf.q(Vector{0.0, 0.0}) - Matrix::identity(n)).max_abs();
        base = std::max(base, b);
        kmax = std::max(kmax, kbar);
        ++families;
        if (!(kbar <= 4)) o.fail("n=" + std::to_string(n) + ": Kbar " + fmt(kbar));
        if (!(r.find("reconstruction").worst <= 1e-10)) o.fail("n=" + std::to_string(n) + ": reconstruction");
        if (!(b <= 1e-12)) o.fail("n=" + std::to_string(n) + ": Q(0) != I");
      } catch (const Error& err) {
        o.fail("n=" + std::to_string(n) + ": " + err.what());
      }
    }
  }
  if (o.pass)
    o.detail = std::to_string(families) + " families n=1..6, max Kbar " + fmt(kmax) + "; reconstruction " + fmt(rec) +
               ", |Q(0)-I| " + fmt(base);
  return o;
}

Outcome criterion_splitting() {
  Outcome o;
  const auto entries = catalog_of(CatalogKind::Split);
  double nf = 0, aj = 0, dphi = 0;
  for (const auto& e : entries) {
    const auto f = oracle_of(e);
    try {
      const auto chart = build_split_chart(f, e.at, bound_at(*f, e.at, 3), 3);
      SplitVerifyOptions opt;
      opt.samples = 1000;
      const auto rep = verify_split(*f, chart, opt);
      const auto& c = chart.certificate();
      nf = std::max(nf, rep.find("normal_form").worst);
      aj = std::max(aj, rep.find("alpha_jet").worst);
      dphi = std::max(dphi, rep.find("dphi_bound").worst / splitting_dphi_bound(c.K, c.sigma_p));
      if (!(rep.find("normal_form").worst <= 1e-9)) o.fail(e.name + ": normal form");
      if (!(rep.find("alpha_jet").worst <= 1e-8)) o.fail(e.name + ": alpha jet");
      if (!(rep.find("dphi_bound").worst <= splitting_dphi_bound(c.K, c.sigma_p))) o.fail(e.name + ": |Dphi|");
    } catch (const Error& err) {
      o.fail(e.name + ": " + err.what());
    }
  }
  if (o.pass)
    o.detail = std::to_string(entries.size()) + " functions; normal form " + fmt(nf) + ", alpha jet " + fmt(aj) +
               ", |Dphi|/bound " + fmt(dphi);
  return o;
}

// Random polynomial of degree <= 3 in n variables.
OraclePtr random_polynomial(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::ostringstream s;
  s.precision(17);
  s << u(rng);
  for (std::size_t i = 1; i <= n; ++i) {
    s << " + " << u(rng) << "*x" << i;
    for (std::size_t j = i; j <= n; ++j) {
      s << " + " << u(rng) << "*x" << i << "*x" << j;
      for (std::size_t l = j; l <= n; ++l) s << " + " << u(rng) << "*x" << i << "*x" << j << "*x" << l;
    }
  }
  return parse_oracle(s.str(), n);
}

std::vector<Vector> norm_points(std::size_t n, const MorseCertificate& cert) {
  auto pts = unit_ball_grid(n, n == 1 ? 401 : n == 2 ? 61 : 21);
  for (const auto& p : cert.critical_points) pts.push_back(p.location);
  return pts;
}

Outcome criterion_openness() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<std::string> passed;
  for (const std::string name : {"double_well", "tilted_well", "saddle", "cubic_pair", "quadric_3d"}) {
    const auto f = oracle_of(find_catalog(name));
    const std::size_t n = f->dims_in();
    MorseCertificate cert;
    try {
      cert = openness_certificate(*f, bound_at(*f, Vector(n, 0.0), 3), find_critical_points(*f));
    } catch (const Error& err) {
      o.fail(name + " certificate refused: " + err.what());
      continue;
    }
    const auto pts = norm_points(n, cert);
    int ok = 0;
    for (int t = 0; t < 20; ++t) {
      const auto p = random_polynomial(n, rng);
      const double size = sampled_ck_norm(*p, pts, cert.k);
      const double w = 0.9 * cert.epsilon * u(rng) / size;
      auto fbar = std::make_shared<SumOracle>(std::vector<OraclePtr>{f, p}, std::vector<double>{1.0, w});
      try {
        const auto rep = verify_openness(*f, *fbar, cert);
        if (rep.passed()) ++ok;
        else o.fail(name + " perturbation " + std::to_string(t) + ": " + failed_checks(rep));
      } catch (const Error& err) {
        o.fail(name + " perturbation " + std::to_string(t) + ": " + err.what());
      }
    }
    const auto bump = make_bump_oracle(cert.critical_points.front().location, 0.5, cert.k);
    const double bsize = sampled_ck_norm(*bump, pts, cert.k);
    auto adversarial = std::make_shared<SumOracle>(std::vector<OraclePtr>{f, bump},
                                                   std::vector<double>{1.0, 2 * cert.epsilon / bsize});
    bool rejected = false;
    try {
      verify_openness(*f, *adversarial, cert);
    } catch (const Error& err) {
      rejected = err.code() == ErrorCode::PerturbationTooLarge;
    }
    if (!rejected) o.fail(name + ": 2 eps perturbation was not rejected");
    if (ok == 20 && rejected) passed.push_back(name);
  }
  std::string list;
  for (const auto& s : passed) list += (list.empty() ? "" : ",") + s;
  o.detail = "passed: " + (list.empty() ? std::string("none") : list) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion_density() {
  Outcome o;
  std::string info;
  for (const std::string name : {"cubic", "monkey"}) {
    const auto f0 = oracle_of(find_catalog(name));
    try {
      const auto p = perturb_to_morse(f0, bound_at(*f0, Vector(f0->dims_in(), 0.0), 3), 0.5, 1.0, 7);
      if (!p.report.passed()) o.fail(name + ": " + failed_checks(p.report));
      info += (info.empty() ? "" : "; ") + name + " |h|=" + fmt(p.h_norm) + ", " +
              std::to_string(p.critical_points.size()) + " critical points, tries " + std::to_string(p.tries);
    } catch (const Error& err) {
      o.fail(name + ": " + err.what());
    }
  }
  o.detail = info + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

std::pair<int, std::string> cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str()};
}

Outcome criterion_determinism() {
  Outcome o;
  const std::vector<std::vector<std::string>> suite = {
      {"bounds", "inverse", "--fn", "x1 + x1^2/4", "--at", "0", "--k", "2"},
      {"bounds", "implicit", "--catalog", "sphere"},
      {"bounds", "rank", "--catalog", "surface_in_3d"},
      {"bounds", "split", "--fn", "x1^2 + x2^3", "--at", "0,0", "--k", "3"},
      {"bounds", "inverse", "--fn", "x1^2"},
      {"verify", "inverse", "--catalog", "henon_like", "--seed", "5"},
      {"verify", "implicit", "--catalog", "curve_pair", "--seed", "5"},
      {"verify", "rank", "--catalog", "bent_fold", "--seed", "5"},
      {"verify", "split", "--catalog", "mixed_3d", "--seed", "5"},
      {"verify", "inverse", "--fn", "x1 + x1^3", "--K", "0.5", "--radius", "10"},
      {"morse", "analyze", "--fn", "x1^4/4 - x1^2/2"},
      {"morse", "certify", "--catalog", "cubic_pair"},
      {"morse", "certify", "--fn", "x1^4/4 - x1^2/2"},
      {"morse", "perturb", "--fn", "x1^3/3", "--eps", "0.5", "--seed", "7"},
      {"morse", "perturb", "--catalog", "monkey", "--seed", "7"},
      {"morse", "check-openness", "--catalog", "tilted_well", "--perturb", "0.00001*x1 - 0.000002*x1^2"},
  };
  std::size_t same = 0;
  for (const auto& args : suite) {
    const auto a = cli(args);
    setenv("SINGCERT_THREADS", "1", 1);
    const auto b = cli(args);
    unsetenv("SINGCERT_THREADS");
    std::string cmd;
    for (const auto& s : args) cmd += (cmd.empty() ? "" : " ") + s;
    try {
      if (a.first == b.first && strip_timestamp(a.second) == strip_timestamp(b.second)) ++same;
      else o.fail("differs: " + cmd);
    } catch (const std::exception&) {
      o.fail("unparsable report: " + cmd);
    }
  }
  o.detail = std::to_string(same) + "/" + std::to_string(suite.size()) +
             " CLI reports byte-identical across reruns (second run single-threaded)" +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget;  // seconds
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--only", only, "run a single criterion (1-9)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "E/EI exactness", 1, criterion_bounds},
      {2, "inverse soundness", 30, criterion_inverse},
      {3, "implicit soundness", 20, criterion_implicit},
      {4, "rank normal form", 20, criterion_rank},
      {5, "diagonalization", 10, criterion_diagonalization},
      {6, "splitting charts", 60, criterion_splitting},
      {7, "Morse openness", 60, criterion_openness},
      {8, "Morse density", 120, criterion_density},
      {9, "CLI determinism", 120, criterion_determinism},
  };
  bool all = true;
  bool ran = false;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    ran = true;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= c.budget) o.fail("runtime " + fmt(secs) + " s over budget");
    std::printf("criterion %d %-20s %s  %.2fs/%gs  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs, c.budget,
                o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  if (!ran) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return all ? 0 : 1;
}
