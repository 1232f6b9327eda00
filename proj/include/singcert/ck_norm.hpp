#pragma once

#include <cstddef>
#include <vector>

#include "singcert/jet_oracle.hpp"
#include "singcert/linalg.hpp"

namespace singcert {

struct Ball {
  Vector center;
  double radius = 1.0;

  bool contains(std::span<const double> x, double slack = 0.0) const;
  // True when this ball contains B_r(c).
  bool contains_ball(std::span<const double> c, double r) const;
};

struct CkNormBound {
  double value = 0.0;
  int order = 1;
  Ball ball;
  bool certified = false;

  // Same K on a smaller ball; never increases the stored value.
  CkNormBound shrink(double new_radius) const;
};

// Points of the axis grid on [c - r, c + r]^n (density per axis, endpoints
// included) that lie in the closed ball, plus the center.
std::vector<Vector> ball_grid(const Ball& ball, int density);

// Deterministic uniform samples in the closed ball.
std::vector<Vector> ball_samples(const Ball& ball, std::size_t count, unsigned long long seed);

// max over grid points and 1 <= p <= k of tensor_norm_bound(D^p f).
CkNormBound estimate_ck_norm(const JetOracle& f, const Ball& ball, int k, int grid_density);

// max over the given points and 1 <= p <= k (0 <= p when include_value).
double sampled_ck_norm(const JetOracle& f, const std::vector<Vector>& points, int k, bool include_value = false);

// E(Kf, Kg, k) = (1^k + ... + k^k) Kg max(Kf, Kf^k).
double compose_bound(double kf, double kg, int k);

// EI(K, L, k); the max defining M0 runs over 0 <= p <= k-1.
double inverse_bound(double K, double L, int k);

// Same recurrence with the max over 1 <= p <= k-1; differs only when L < 1.
double inverse_bound_from_one(double K, double L, int k);

}  // namespace singcert
