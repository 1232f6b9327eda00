#include "singcert/morse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "singcert/error.hpp"
#include "singcert/newton.hpp"
#include "singcert/parallel.hpp"
#include "singcert/spectral.hpp"
#include "singcert/splitting.hpp"
#include "singcert/taylor.hpp"

namespace singcert {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

Vector gradient(const JetOracle& f, std::span<const double> x) { return f.jacobian(x).row(0); }

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= b;
  return r;
}

struct CubeGrid {
  std::size_t n;
  int m;
  double h;

  std::size_t size() const { return ipow(static_cast<std::size_t>(m), n); }
  Vector point(std::size_t idx) const {
    Vector x(n);
    for (std::size_t a = n; a-- > 0;) {
      x[a] = -1.0 + h * static_cast<double>(idx % m);
      idx /= m;
    }
    return x;
  }
};

CubeGrid cube_grid(std::size_t n, int density) {
  if (density < 2) throw Error(ErrorCode::InvalidArgument, "grid density must be at least 2");
  return CubeGrid{n, density, 2.0 / (density - 1)};
}

int default_norm_density(std::size_t n) { return n == 1 ? 401 : n == 2 ? 61 : n == 3 ? 21 : 11; }

double min_pairwise_gap(const std::vector<double>& v) {
  double best = INFINITY;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) best = std::min(best, std::abs(v[i] - v[j]));
  return best;
}

OraclePtr linear_oracle(std::span<const double> coeffs) {
  const std::size_t n = coeffs.size();
  Polynomial poly;
  for (std::size_t i = 0; i < n; ++i) {
    if (coeffs[i] == 0.0) continue;
    MultiIndex e(n, 0);
    e[i] = 1;
    poly.push_back(Term{coeffs[i], e});
  }
  return make_polynomial_oracle(PolynomialMap(n, {poly}));
}

struct EtaBound {
  double eta = INFINITY;
  double finest_step = INFINITY;
};

// Lower bound of |Df| over the unit ball minus the rho-neighbourhoods of the points.
// Each cube cell gets |Df(center)| - K * half diagonal; cells are split until that
// bound is within 10% of |Df(center)| or the cell is tiny.
EtaBound certified_gradient_floor(const JetOracle& f, double K, double rho, const std::vector<CriticalPoint>& points,
                                  int cells_per_axis) {
  const std::size_t n = f.dims_in();
  const double sn = std::sqrt(static_cast<double>(n));
  const double side0 = 2.0 / cells_per_axis;
  const std::size_t rows = ipow(static_cast<std::size_t>(cells_per_axis), n - 1);
  const std::size_t children = ipow(2, n);
  std::vector<EtaBound> per_row(rows);
  parallel_for(rows, [&](std::size_t r) {
    EtaBound local;
    struct Cell {
      Vector center;
      double side;
    };
    std::vector<Cell> stack;
    for (int j = 0; j < cells_per_axis; ++j) {
      Vector ctr(n);
      std::size_t rest = r * cells_per_axis + j;
      for (std::size_t a = n; a-- > 0;) {
        ctr[a] = -1.0 + side0 * (static_cast<double>(rest % cells_per_axis) + 0.5);
        rest /= cells_per_axis;
      }
      stack.push_back({ctr, side0});
    }
    std::size_t evaluations = 0;
    while (!stack.empty()) {
      Cell cell = std::move(stack.back());
      stack.pop_back();
      const double half_diag = cell.side * sn / 2;
      if (norm(cell.center) - half_diag > 1.0) continue;
      bool inside = false;
      for (const auto& p : points)
        if (distance(cell.center, p.location) + half_diag < rho) inside = true;
      if (inside) continue;
      const double g = norm(gradient(f, cell.center));
      ++evaluations;
      const double lb = g - K * half_diag;
      if (lb >= 0.9 * g || cell.side < 1e-10 || evaluations > 20000000) {
        local.eta = std::min(local.eta, lb);
        local.finest_step = std::min(local.finest_step, cell.side);
        continue;
      }
      for (std::size_t ch = 0; ch < children; ++ch) {
        Vector ctr = cell.center;
        for (std::size_t a = 0; a < n; ++a) ctr[a] += ((ch >> a) & 1 ? 0.25 : -0.25) * cell.side;
        stack.push_back({std::move(ctr), cell.side / 2});
      }
    }
    per_row[r] = local;
  });
  EtaBound out;
  for (const auto& b : per_row) {
    out.eta = std::min(out.eta, b.eta);
    out.finest_step = std::min(out.finest_step, b.finest_step);
  }
  out.eta = std::max(0.0, out.eta);
  return out;
}

}  // namespace

CriticalPoint describe_critical_point(const JetOracle& f, std::span<const double> x) {
  CriticalPoint c;
  c.location.assign(x.begin(), x.end());
  c.value = f.value(x)[0];
  const Matrix h = f.hessian(x);
  const SymmetricEigen eig = symmetric_eigen((h + h.transpose()) * 0.5);
  c.sigma_n = INFINITY;
  for (double l : eig.values) {
    c.sigma_n = std::min(c.sigma_n, std::abs(l));
    if (l < 0) ++c.morse_index;
  }
  return c;
}

int default_search_density(std::size_t n) { return n == 1 ? 2001 : n == 2 ? 201 : n == 3 ? 41 : 17; }

std::vector<Vector> unit_ball_grid(std::size_t n, int density, double slack) {
  const CubeGrid g = cube_grid(n, density);
  std::vector<Vector> out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vector x = g.point(i);
    if (norm(x) <= 1.0 + slack) out.push_back(std::move(x));
  }
  return out;
}

std::vector<CriticalPoint> find_critical_points(const JetOracle& f, const CriticalSearchOptions& options) {
  const std::size_t n = f.dims_in();
  if (f.dims_out() != 1) throw Error(ErrorCode::InvalidArgument, "critical points need a scalar function");
  if (n > 4) throw Error(ErrorCode::InvalidArgument, "critical point search supports n <= 4");
  const CubeGrid g = cube_grid(n, options.grid_density > 0 ? options.grid_density : default_search_density(n));
  const std::size_t total = g.size();
  std::vector<double> grad(total, INFINITY);
  parallel_for(total, [&](std::size_t i) {
    const Vector x = g.point(i);
    if (norm(x) <= 1.0) grad[i] = norm(gradient(f, x));
  });

  std::vector<std::size_t> seeds;
  std::vector<long> offsets;
  {
    const std::size_t count = ipow(3, n);
    for (std::size_t o = 0; o < count; ++o) {
      std::size_t rest = o;
      long off = 0;
      bool zero = true;
      for (std::size_t a = 0; a < n; ++a) {
        const long d = static_cast<long>(rest % 3) - 1;
        rest /= 3;
        if (d != 0) zero = false;
        off = off * g.m + d;
      }
      if (!zero) offsets.push_back(off);
    }
  }
  for (std::size_t i = 0; i < total; ++i) {
    if (!std::isfinite(grad[i])) continue;
    bool is_min = true;
    std::size_t rest = i;
    std::vector<int> coord(n);
    for (std::size_t a = n; a-- > 0;) {
      coord[a] = static_cast<int>(rest % g.m);
      rest /= g.m;
    }
    for (std::size_t o = 0; o < ipow(3, n) && is_min; ++o) {
      std::size_t r = o;
      long j = 0;
      bool inside = true, zero = true;
      for (std::size_t a = 0; a < n; ++a) {
        const int d = static_cast<int>(r % 3) - 1;
        r /= 3;
        if (d != 0) zero = false;
        const int c = coord[a] + d;
        if (c < 0 || c >= g.m) inside = false;
        j = j * g.m + c;
      }
      if (zero || !inside) continue;
      if (grad[static_cast<std::size_t>(j)] < grad[i]) is_min = false;
    }
    if (is_min) seeds.push_back(i);
  }
  std::stable_sort(seeds.begin(), seeds.end(), [&](std::size_t a, std::size_t b) { return grad[a] < grad[b]; });
  if (seeds.size() > options.max_seeds) seeds.resize(options.max_seeds);

  std::vector<Vector> polished(seeds.size());
  std::vector<char> ok(seeds.size(), 0);
  parallel_for(seeds.size(), [&](std::size_t s) {
    NewtonOptions opt;
    opt.max_iter = 200;
    opt.tol = 1e-15;
    opt.domain = Ball{Vector(n, 0.0), 1.0};
    try {
      const auto res = newton_solve([&](std::span<const double> x) { return gradient(f, x); },
                                    [&](std::span<const double> x) { return f.hessian(x); }, g.point(seeds[s]), opt);
      if (norm(gradient(f, res.x)) <= options.gradient_tol && norm(res.x) <= 1.0 + 1e-12) {
        polished[s] = res.x;
        ok[s] = 1;
      }
    } catch (const Error&) {
    }
  });
  std::vector<CriticalPoint> out;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    if (!ok[s]) continue;
    bool dup = false;
    for (const auto& c : out)
      if (distance(c.location, polished[s]) <= options.merge_radius) dup = true;
    if (!dup) out.push_back(describe_critical_point(f, polished[s]));
  }
  std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) { return a.location < b.location; });
  return out;
}

double entropy_bound(double K, std::size_t n, int k, double r, double c) {
  if (!(r > 0 && r < 1)) throw Error(ErrorCode::InvalidArgument, "entropy_bound needs 0 < r < 1");
  if (k < 3) throw Error(ErrorCode::InvalidArgument, "entropy_bound needs k >= 3");
  if (!(c > 0)) throw Error(ErrorCode::InvalidArgument, "entropy constant c must be positive");
  const double rk = K / factorial(k - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i <= n; ++i) sum += std::pow(K, static_cast<double>(i)) * std::pow(rk, static_cast<double>(n - i) / k);
  return c * sum / std::pow(r, static_cast<double>(n) - 1.0 + 1.0 / k);
}

std::size_t covering_number(const std::vector<Vector>& points, double r) {
  std::vector<char> covered(points.size(), 0);
  std::size_t balls = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (covered[i]) continue;
    ++balls;
    for (std::size_t j = i; j < points.size(); ++j)
      if (!covered[j] && distance(points[i], points[j]) <= r) covered[j] = 1;
  }
  return balls;
}

double smoothstep(double u, int k, int derivative) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return derivative == 0 ? 1.0 : 0.0;
  // sum_j C(k+j, j) C(2k+1, k-j) (-1)^j u^{k+1+j}
  double s = 0.0;
  for (int j = 0; j <= k; ++j) {
    const int e = k + 1 + j;
    if (e < derivative) continue;
    double coef = binomial(k + j, j) * binomial(2 * k + 1, k - j) * (j % 2 ? -1.0 : 1.0);
    for (int q = 0; q < derivative; ++q) coef *= e - q;
    s += coef * std::pow(u, e - derivative);
  }
  return s;
}

OraclePtr make_bump_oracle(Vector center, double d, int k) {
  if (!(d > 0)) throw Error(ErrorCode::InvalidArgument, "bump width must be positive");
  const std::size_t n = center.size();
  auto fn = [center, d, k](std::span<const TaylorJet> x) {
    const auto space = x[0].space_ptr();
    TaylorJet s(space, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const TaylorJet dx = x[i] - center[i];
      s += dx * dx;
    }
    const double t = std::sqrt(s.value());
    if (t <= d / 4) return std::vector<TaylorJet>{TaylorJet(space, 1.0)};
    if (t >= d / 2) return std::vector<TaylorJet>{TaylorJet(space, 0.0)};
    const double u = (d / 2 - t) * 4 / d;
    Vector derivs(space->order() + 1);
    for (int j = 0; j <= space->order(); ++j) derivs[j] = smoothstep(u, k, j) * std::pow(-4 / d, j);
    return std::vector<TaylorJet>{sqrt(s).compose(derivs)};
  };
  return std::make_shared<TaylorOracle>(n, 1, fn, k + 1, "bump");
}

double bump_ck_norm(double d, std::size_t n, int k) {
  const auto bump = make_bump_oracle(Vector(n, 0.0), d, k);
  std::vector<Vector> ray;
  const int count = 4001;
  for (int i = 0; i < count; ++i) {
    Vector x(n, 0.0);
    x[0] = d / 4 + (d / 4) * i / (count - 1);
    ray.push_back(std::move(x));
  }
  return sampled_ck_norm(*bump, ray, k);
}

DensityConstants density_constants(double K, std::size_t n, int k, double epsilon, double c, std::optional<double> bump_c1) {
  if (!(epsilon > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (k < 3) throw Error(ErrorCode::InvalidArgument, "density constants need k >= 3");
  if (!(c > 0)) throw Error(ErrorCode::InvalidArgument, "entropy constant c must be positive");
  if (!(K > 0)) throw Error(ErrorCode::InvalidArgument, "K must be positive");
  DensityConstants dc;
  dc.K = K;
  dc.n = n;
  dc.k = k;
  dc.epsilon = epsilon;
  dc.c = c;
  dc.Rk = K / factorial(k - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i <= n; ++i) sum += std::pow(K, static_cast<double>(i)) * std::pow(dc.Rk, static_cast<double>(n - i) / k);
  const double nn = static_cast<double>(n);
  const double fourth = std::pow(std::pow(epsilon, nn) / (std::pow(2.0, nn) * c * sum), static_cast<double>(k) / (k - 1));
  dc.r = 0.5 * std::min({epsilon, 1.0, dc.Rk * std::pow(epsilon, k) / std::pow(K, k), fourth});
  dc.gamma = std::pow(dc.r, 1.0 - 1.0 / k);
  dc.d = dc.gamma * dc.gamma / (4 * K * K);
  dc.N = std::ceil(std::pow(1 + 2 / dc.d, nn));
  dc.eta1 = std::min(dc.r, dc.gamma * dc.gamma / (8 * (K + epsilon)));
  dc.eta = dc.eta1 / 4;
  dc.psi1 = dc.gamma;
  dc.C1 = bump_c1 ? *bump_c1 : bump_ck_norm(dc.d, n, k);
  dc.psi2 = dc.eta1 / (4 * dc.N * dc.C1);
  dc.psi3_cap = dc.gamma * dc.gamma / (8 * (K + epsilon) * (K + epsilon));
  dc.entropy = entropy_bound(K, n, k, dc.r, c);
  dc.measure_condition = dc.entropy * std::pow(2 * dc.r / epsilon, nn) < 1.0;
  return dc;
}

MorseCertificate openness_certificate(const JetOracle& f, const CkNormBound& kbound, std::vector<CriticalPoint> points,
                                      int grid_density) {
  const std::size_t n = f.dims_in();
  MorseCertificate c;
  c.K = kbound.value;
  c.k = kbound.order;
  if (!(c.K > 0)) throw Error(ErrorCode::InvalidArgument, "K must be positive");
  if (c.k < 2) throw Error(ErrorCode::InvalidArgument, "openness needs k >= 2");
  c.gamma = INFINITY;
  c.boundary_distance = INFINITY;
  std::vector<double> values;
  for (const auto& p : points) {
    c.gamma = std::min(c.gamma, p.sigma_n);
    c.boundary_distance = std::min(c.boundary_distance, 1.0 - norm(p.location));
    values.push_back(p.value);
  }
  if (!points.empty() && c.gamma <= 1e-9 * std::max(1.0, c.K)) {
    throw Error(ErrorCode::NonMorse, "degenerate critical point, sigma_n = " + format_double(c.gamma));
  }
  c.d = min_pairwise_gap(values);
  if (c.d <= 1e-12) throw Error(ErrorCode::DuplicateCriticalValues, "two critical values coincide");
  if (c.boundary_distance <= 0) {
    throw Error(ErrorCode::EtaNotPositive, "a critical point lies on the boundary sphere, so eta = 0");
  }
  c.rho = std::min({c.gamma * c.gamma / (128 * c.K * c.K), c.d / (8 * c.K), c.boundary_distance});
  c.critical_points = std::move(points);

  if (grid_density <= 0) grid_density = n == 1 ? 256 : n == 2 ? 64 : n == 3 ? 16 : 8;
  const EtaBound eb = certified_gradient_floor(f, c.K, c.rho, c.critical_points, grid_density);
  c.grid_density = grid_density;
  c.grid_step = eb.finest_step;
  c.eta = eb.eta;
  if (!(c.eta > 0)) {
    throw Error(ErrorCode::EtaNotPositive,
                "certified eta bound is not positive down to cell size " + format_double(eb.finest_step));
  }
  c.epsilon = std::min({c.eta / 2, c.gamma * c.gamma / (64 * c.K), c.d / 4});
  return c;
}

double sampled_ck_distance(const JetOracle& f, const JetOracle& g, int k, const std::vector<Vector>& points) {
  std::vector<double> best(points.size(), 0.0);
  parallel_for(points.size(), [&](std::size_t i) {
    for (int p = 1; p <= k; ++p) {
      DerivativeTensor a = f.derivative(points[i], p);
      const DerivativeTensor b = g.derivative(points[i], p);
      for (std::size_t e = 0; e < a.data().size(); ++e) a.data()[e] -= b.data()[e];
      best[i] = std::max(best[i], tensor_norm_bound(a));
    }
  });
  return points.empty() ? 0.0 : *std::max_element(best.begin(), best.end());
}

VerificationReport verify_openness(const JetOracle& f, const JetOracle& fbar, const MorseCertificate& cert,
                                   const OpennessVerifyOptions& options) {
  const std::size_t n = f.dims_in();
  std::vector<Vector> norm_points =
      unit_ball_grid(n, options.norm_grid_density > 0 ? options.norm_grid_density : default_norm_density(n));
  for (const auto& p : cert.critical_points) norm_points.push_back(p.location);
  const double dist = sampled_ck_distance(f, fbar, cert.k, norm_points);
  if (!(dist < cert.epsilon)) {
    throw Error(ErrorCode::PerturbationTooLarge,
                "sampled C^k distance " + format_double(dist) + " is not below epsilon " + format_double(cert.epsilon));
  }
  const auto bar = find_critical_points(fbar, options.search);
  VerificationReport report;

  {
    auto c = start_check("clause_i", cert.gamma / 2);
    c.lower_bound = true;
    c.worst = INFINITY;
    const int density = options.search.grid_density > 0 ? options.search.grid_density : default_search_density(n);
    std::vector<Vector> pts = unit_ball_grid(n, density);
    for (const auto& p : bar) pts.push_back(p.location);
    std::vector<double> sig(pts.size(), INFINITY);
    parallel_for(pts.size(), [&](std::size_t i) {
      if (norm(gradient(fbar, pts[i])) < cert.eta / 2) sig[i] = describe_critical_point(fbar, pts[i]).sigma_n;
    });
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (std::isfinite(sig[i])) ++c.samples;
      if (sig[i] < c.worst) {
        c.worst = sig[i];
        c.witness = pts[i];
      }
    }
    c.passed = c.worst >= c.threshold;
    c.note = std::to_string(c.samples) + " points with |Df| < eta/2";
    report.checks.push_back(c);
  }
  {
    auto c = start_check("clause_ii", cert.rho);
    bool one_to_one = bar.size() == cert.critical_points.size();
    for (const auto& p : cert.critical_points) {
      double best = INFINITY;
      int matches = 0;
      for (const auto& q : bar) {
        const double dd = distance(p.location, q.location);
        best = std::min(best, dd);
        if (dd < cert.rho) ++matches;
      }
      if (matches != 1) one_to_one = false;
      if (best >= c.worst) {
        c.worst = best;
        c.witness = p.location;
      }
    }
    for (const auto& q : bar)
      if (norm(q.location) >= 1.0) one_to_one = false;
    c.samples = bar.size();
    c.passed = one_to_one && c.worst < c.threshold;
    c.note = std::to_string(bar.size()) + " perturbed vs " + std::to_string(cert.critical_points.size()) + " original critical points";
    report.checks.push_back(c);
  }
  {
    auto c = start_check("clause_iii", cert.gamma / 2);
    c.lower_bound = true;
    c.worst = INFINITY;
    for (const auto& q : bar) {
      if (q.sigma_n < c.worst) {
        c.worst = q.sigma_n;
        c.witness = q.location;
      }
    }
    c.samples = bar.size();
    c.passed = c.worst >= c.threshold;
    report.checks.push_back(c);
  }
  {
    auto c = start_check("clause_iv", cert.d / 2);
    c.lower_bound = true;
    std::vector<double> values;
    for (const auto& q : bar) values.push_back(q.value);
    c.worst = min_pairwise_gap(values);
    c.samples = bar.size();
    c.passed = c.worst >= c.threshold;
    report.checks.push_back(c);
  }
  return report;
}

Perturbation perturb_to_morse(OraclePtr f0, const CkNormBound& kbound, double epsilon, double c, unsigned long long seed,
                              const PerturbOptions& options) {
  const std::size_t n = f0->dims_in();
  if (n > 3) throw Error(ErrorCode::InvalidArgument, "perturb_to_morse supports n <= 3");
  if (f0->dims_out() != 1) throw Error(ErrorCode::InvalidArgument, "perturb_to_morse needs a scalar function");
  const int k = kbound.order;
  Perturbation out;
  out.constants = density_constants(kbound.value, n, k, epsilon, c);
  const DensityConstants& dc = out.constants;
  const double K = dc.K;

  CriticalSearchOptions search;
  search.grid_density = options.grid_density > 0 ? options.grid_density : default_search_density(n);
  const std::vector<Vector> grid = unit_ball_grid(n, search.grid_density);
  std::vector<Vector> grad(grid.size());
  std::vector<double> sig(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    grad[i] = gradient(*f0, grid[i]);
    sig[i] = describe_critical_point(*f0, grid[i]).sigma_n;
  });

  const double radius = epsilon - dc.r / 2;
  bool found = false;
  OraclePtr f1;
  std::vector<CriticalPoint> crit1;
  for (std::size_t t = 0; t < options.max_tries && !found; ++t) {
    std::seed_seq sseq{static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(t)};
    std::mt19937_64 rng(sseq);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> uni;
    Vector v(n);
    for (auto& x : v) x = gauss(rng);
    const double len = norm(v);
    const double rad = radius * std::pow(uni(rng), 1.0 / n);
    for (auto& x : v) x = len > 0 ? x / len * rad : 0.0;
    out.tries = t + 1;

    bool admissible = true;
    for (std::size_t i = 0; i < grid.size() && admissible; ++i)
      if (distance(grad[i], v) <= dc.gamma / 2 && !(sig[i] > dc.gamma)) admissible = false;
    if (!admissible) continue;
    Vector neg(n);
    for (std::size_t i = 0; i < n; ++i) neg[i] = -v[i];
    auto cand = std::make_shared<SumOracle>(std::vector<OraclePtr>{f0, linear_oracle(neg)}, Vector{1.0, 1.0});
    auto crit = find_critical_points(*cand, search);
    if (std::any_of(crit.begin(), crit.end(), [&](const CriticalPoint& p) { return !(p.sigma_n > dc.gamma); })) continue;
    out.tilt = v;
    f1 = cand;
    crit1 = std::move(crit);
    found = true;
  }
  if (!found) throw Error(ErrorCode::SearchExhausted, "no admissible tilt after " + std::to_string(out.tries) + " tries");

  std::stable_sort(crit1.begin(), crit1.end(), [](const CriticalPoint& a, const CriticalPoint& b) { return a.value < b.value; });
  Vector neg(n);
  for (std::size_t i = 0; i < n; ++i) neg[i] = -out.tilt[i];
  std::vector<OraclePtr> parts{linear_oracle(neg)};
  Vector weights{1.0};
  for (std::size_t i = 0; i < crit1.size(); ++i) {
    const double ci = static_cast<double>(i) * dc.eta1 / (4 * dc.N * dc.C1);
    out.centers.push_back(crit1[i].location);
    out.coefficients.push_back(ci);
    parts.push_back(make_bump_oracle(crit1[i].location, dc.d, k));
    weights.push_back(ci);
  }
  out.h = std::make_shared<SumOracle>(parts, weights);
  out.f = std::make_shared<SumOracle>(std::vector<OraclePtr>{f0, out.h}, Vector{1.0, 1.0});

  std::vector<Vector> norm_points = unit_ball_grid(n, default_norm_density(n));
  for (const auto& ctr : out.centers) {
    for (std::size_t a = 0; a < n; ++a) {
      for (double sgn : {-1.0, 1.0}) {
        for (int i = 0; i <= 200; ++i) {
          Vector x = ctr;
          x[a] += sgn * (dc.d / 4 + dc.d / 4 * i / 200.0);
          norm_points.push_back(std::move(x));
        }
      }
    }
  }
  out.h_norm = sampled_ck_norm(*out.h, norm_points, k);
  out.critical_points = find_critical_points(*out.f, search);
  const auto& cps = out.critical_points;

  auto& checks = out.report.checks;
  {
    auto chk = start_check("h_norm", epsilon);
    chk.worst = out.h_norm;
    chk.samples = norm_points.size();
    chk.passed = out.h_norm < epsilon;
    checks.push_back(chk);
  }
  {
    auto chk = start_check("clause_i_nondegenerate", dc.psi1);
    chk.lower_bound = true;
    chk.worst = INFINITY;
    for (const auto& p : cps)
      if (p.sigma_n < chk.worst) {
        chk.worst = p.sigma_n;
        chk.witness = p.location;
      }
    chk.samples = cps.size();
    chk.passed = chk.worst >= chk.threshold;
    checks.push_back(chk);
  }
  {
    auto chk = start_check("clause_ii_separation", dc.d);
    chk.lower_bound = true;
    chk.worst = INFINITY;
    for (std::size_t i = 0; i < cps.size(); ++i)
      for (std::size_t j = i + 1; j < cps.size(); ++j)
        if (distance(cps[i].location, cps[j].location) < chk.worst) {
          chk.worst = distance(cps[i].location, cps[j].location);
          chk.witness = cps[i].location;
        }
    chk.samples = cps.size();
    chk.passed = chk.worst >= chk.threshold && static_cast<double>(cps.size()) <= dc.N;
    chk.note = std::to_string(cps.size()) + " critical points, bound N = " + format_double(dc.N);
    checks.push_back(chk);
  }
  {
    auto chk = start_check("clause_iii_values", dc.psi2);
    chk.lower_bound = true;
    std::vector<double> values;
    for (const auto& p : cps) values.push_back(p.value);
    chk.worst = min_pairwise_gap(values);
    chk.samples = cps.size();
    chk.passed = chk.worst >= chk.threshold;
    checks.push_back(chk);
  }
  {
    // psi3 per critical point: the Morse chart radius with K + eps, capped
    std::vector<double> psi3;
    for (const auto& p : cps) psi3.push_back(std::min(split_radii(K + epsilon, p.sigma_n, n).chart, dc.psi3_cap));
    auto chk = start_check("clause_v_small_gradient", 1.0);
    const std::vector<Vector> pts = unit_ball_grid(n, options.check_density);
    std::vector<double> ratio(pts.size(), -1.0);
    parallel_for(pts.size(), [&](std::size_t i) {
      if (norm(gradient(*out.f, pts[i])) > dc.eta) return;
      double best = INFINITY;
      for (std::size_t j = 0; j < cps.size(); ++j) best = std::min(best, distance(pts[i], cps[j].location) / psi3[j]);
      ratio[i] = best;
    });
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (ratio[i] < 0) continue;
      ++chk.samples;
      if (ratio[i] >= chk.worst) {
        chk.worst = ratio[i];
        chk.witness = pts[i];
      }
    }
    chk.passed = chk.worst <= chk.threshold;
    chk.note = "distance / psi3 over " + std::to_string(chk.samples) + " grid points with |Df| <= eta of " +
               std::to_string(pts.size());
    checks.push_back(chk);
  }
  return out;
}

}  // namespace singcert
