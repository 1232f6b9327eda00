#pragma once

#include <cmath>
#include <optional>

#include "singcert/ck_norm.hpp"
#include "singcert/jet_oracle.hpp"
#include "singcert/verification.hpp"

namespace singcert {

struct CriticalPoint {
  Vector location;
  double value = 0.0;
  double sigma_n = 0.0;  // smallest |eigenvalue| of the Hessian
  int morse_index = 0;   // number of negative eigenvalues
};

CriticalPoint describe_critical_point(const JetOracle& f, std::span<const double> x);

struct CriticalSearchOptions {
  int grid_density = 0;          // per axis on [-1, 1]^n; 0 picks by dimension
  double merge_radius = 1e-7;
  double gradient_tol = 1e-9;
  std::size_t max_seeds = 20000;
};

int default_search_density(std::size_t n);

// Local minima of |Df| on the grid of the closed unit ball, polished by
// Newton on Df. Seeds that fail to converge are dropped.
std::vector<CriticalPoint> find_critical_points(const JetOracle& f, const CriticalSearchOptions& options = {});

// c sum_{i=0}^n K^i (R_k^{1/k})^{n-i} / r^{n-1+1/k}, R_k = K/(k-1)!.
double entropy_bound(double K, std::size_t n, int k, double r, double c);

// Greedy cover of the points by closed balls of radius r; an upper bound for
// the minimal covering number of the finite set.
std::size_t covering_number(const std::vector<Vector>& points, double r);

// Degree 2k+1 smoothstep: 0 at u <= 0, 1 at u >= 1, C^k at both ends.
double smoothstep(double u, int k, int derivative = 0);

// x -> g(|x - center|) with g = 1 on |t| < d/4 and 0 on |t| > d/2.
OraclePtr make_bump_oracle(Vector center, double d, int k);
// C^k norm of that bump (independent of the center), sampled along a ray.
double bump_ck_norm(double d, std::size_t n, int k);

struct DensityConstants {
  double K = 0.0;
  std::size_t n = 1;
  int k = 3;
  double epsilon = 0.0;
  double c = 1.0;
  double Rk = 0.0;
  double r = 0.0;
  double gamma = 0.0;
  double d = 0.0;
  double N = 0.0;  // ceil((1 + 2/d)^n), may be huge
  double eta1 = 0.0;
  double eta = 0.0;
  double psi1 = 0.0;
  double psi2 = 0.0;
  double psi3_cap = 0.0;  // gamma^2 / (8 (K + eps)^2); psi3 = min(chart radius, cap)
  double C1 = 0.0;
  double entropy = 0.0;  // entropy_bound at r
  bool measure_condition = false;  // entropy * m(B_2r) < m(B_eps)
};

DensityConstants density_constants(double K, std::size_t n, int k, double epsilon, double c,
                                   std::optional<double> bump_c1 = std::nullopt);

struct MorseCertificate {
  std::vector<CriticalPoint> critical_points;
  double K = 0.0;
  int k = 2;
  double gamma = 0.0;
  double d = INFINITY;  // +inf with a single critical point
  double boundary_distance = 0.0;
  double rho = 0.0;
  double eta = 0.0;
  double epsilon = 0.0;
  int grid_density = 0;    // initial cells per axis
  double grid_step = 0.0;  // smallest cell side used
};

// eta is a lower bound of |Df| off the rho-neighbourhoods: cube cells of [-1, 1]^n meeting the
// region contribute |Df(center)| - K * half diagonal, refined adaptively from grid_density cells
// per axis (0 picks by dimension).
MorseCertificate openness_certificate(const JetOracle& f, const CkNormBound& kbound, std::vector<CriticalPoint> points,
                                      int grid_density = 0);

// sup over the points of the C^k distance (orders 1..k) between f and g.
double sampled_ck_distance(const JetOracle& f, const JetOracle& g, int k, const std::vector<Vector>& points);

struct OpennessVerifyOptions {
  CriticalSearchOptions search;
  int norm_grid_density = 0;  // 0 picks by dimension
};

// Clauses (i)-(iv) for fbar near f; PerturbationTooLarge if the sampled
// C^k distance is not below cert.epsilon.
VerificationReport verify_openness(const JetOracle& f, const JetOracle& fbar, const MorseCertificate& cert,
                                   const OpennessVerifyOptions& options = {});

struct PerturbOptions {
  std::size_t max_tries = 10000;
  int grid_density = 0;   // admissibility and critical point search
  int check_density = 200;  // small-gradient clause grid per axis
};

struct Perturbation {
  DensityConstants constants;
  Vector tilt;                  // v; h = -<v, x> + sum c_i bump_i
  std::vector<Vector> centers;  // bump centers, increasing f1 value
  Vector coefficients;
  std::size_t tries = 0;
  OraclePtr h;
  OraclePtr f;
  double h_norm = 0.0;
  std::vector<CriticalPoint> critical_points;
  VerificationReport report;
};

Perturbation perturb_to_morse(OraclePtr f0, const CkNormBound& kbound, double epsilon, double c, unsigned long long seed,
                              const PerturbOptions& options = {});

// Cube grid on [-1, 1]^n with the given density per axis, restricted to |x| <= 1 + slack.
std::vector<Vector> unit_ball_grid(std::size_t n, int density, double slack = 0.0);

}  // namespace singcert
