#pragma once

#include "singcert/linalg.hpp"

namespace singcert {

// Gauss-Legendre nodes and weights mapped to [0, 1].
struct GaussRule {
  Vector nodes;
  Vector weights;
};

GaussRule gauss_legendre(int count);

}  // namespace singcert
