#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "singcert/ck_norm.hpp"
#include "singcert/linalg.hpp"

namespace singcert {

// One sampled property. `worst` is compared against `threshold` in the
// direction the property needs; `witness` is the point that realised it.
struct PropertyCheck {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  double threshold = 0.0;
  Vector witness;
  std::size_t samples = 0;
  std::string note;
  bool lower_bound = false;  // passes when worst >= threshold
};

inline PropertyCheck start_check(std::string name, double threshold = 0.0) {
  PropertyCheck c;
  c.name = std::move(name);
  c.threshold = threshold;
  return c;
}

struct VerificationReport {
  std::vector<PropertyCheck> checks;

  bool passed() const;
  const PropertyCheck& find(const std::string& name) const;
};

using PointMap = std::function<Vector(std::span<const double>)>;

// max |F(a) - F(b)| / |a - b| over sampled pairs in the ball: half independent
// pairs, half pairs at distance 1e-3 * radius. Fails above bound (1 + 1e-9);
// an exception from F counts as a failure.
PropertyCheck lipschitz_check(std::string name, double bound, const Ball& ball, std::size_t pairs,
                              unsigned long long seed, const PointMap& map);

// max |F(x)| over the given points against an absolute threshold.
PropertyCheck max_norm_check(std::string name, double threshold, const std::vector<Vector>& points, const PointMap& map);

}  // namespace singcert
