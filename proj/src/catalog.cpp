#include "singcert/catalog.hpp"

#include <algorithm>

#include "singcert/error.hpp"

namespace singcert {

const std::vector<CatalogEntry>& catalog() {
  using K = CatalogKind;
  static const std::vector<CatalogEntry> entries = {
      // local inverses
      {"identity", K::Inverse, "x1", 1, {0.0}},
      {"quadratic_shift", K::Inverse, "x1 + x1^2/4", 1, {0.0}},
      {"diagonal_scale", K::Inverse, "2*x1; 3*x2", 2, {0.0, 0.0}},
      {"cubic_shift", K::Inverse, "x1 + x1^3", 1, {0.0}},
      {"square_at_one", K::Inverse, "x1^2", 1, {1.0}},
      {"henon_like", K::Inverse, "x1 + x2^2; x2 - x1^2", 2, {0.0, 0.0}},
      {"mixed_planar", K::Inverse, "x1 + 0.5*x1*x2; x2 + x1^2 - x2^3/3", 2, {0.0, 0.0}},
      {"rotation_quartic", K::Inverse, "x1 - x2 + x1^2*x2; x1 + x2 + x2^4/4", 2, {0.0, 0.0}},
      {"complex_square", K::Inverse, "x1^2 - x2^2; 2*x1*x2", 2, {1.0, 0.5}},
      {"cyclic_3d", K::Inverse, "x1 + x2*x3; x2 + x3^2; x3 + x1^2", 3, {0.0, 0.0, 0.0}},
      {"quartic_3d", K::Inverse, "2*x1 + x1^4; x2 - x3 + x1*x2; x2 + x3 + x3^3", 3, {0.0, 0.0, 0.0}},
      // implicit functions: F(x, y) with x = (x1..xm), y = the rest
      {"circle", K::Implicit, "x1^2 + x2^2 - 1", 2, {0.0, 1.0}, 1},
      {"cubic_root", K::Implicit, "x2^3 + x2 - x1", 2, {0.0, 0.0}, 1},
      {"graph_line", K::Implicit, "x2 - x1", 2, {0.0, 0.0}, 1},
      {"zero_graph", K::Implicit, "x2", 2, {0.0, 0.0}, 1},
      {"curve_pair", K::Implicit, "x2 + x3^2 - x1; x3 - x1*x2 + x2^3", 3, {0.0, 0.0, 0.0}, 1},
      {"sphere", K::Implicit, "x1^2 + x2^2 + x3^2 - 1", 3, {0.0, 0.0, 1.0}, 2},
      {"surface_pair", K::Implicit, "x3 + x1*x4 - x2^2; x4 - x3^2 + x1 + 0.5*x2", 4, {0.0, 0.0, 0.0, 0.0}, 2},
      {"offset_pair", K::Implicit, "x2^2 + x3^2 - 2 + x1; x2 - x3 + x1^2", 3, {0.0, 1.0, 1.0}, 1},
      // constant rank maps
      {"projection", K::Rank, "x1; 0", 2, {0.0, 0.0}, 0, 1},
      {"parabola_graph", K::Rank, "x1; x1^2", 2, {0.0, 0.0}, 0, 1},
      {"sum_graph", K::Rank, "x1 + x2; (x1 + x2)^2", 2, {0.0, 0.0}, 0, 1},
      {"bent_fold", K::Rank, "x1 + x2^2; (x1 + x2^2)^2 + x1 + x2^2", 2, {0.0, 0.0}, 0, 1},
      {"surface_in_3d", K::Rank, "x1 + x3^2; x2 - x3; (x1 + x3^2)*(x2 - x3) + (x1 + x3^2)^2", 3, {0.0, 0.0, 0.0}, 0, 2},
      {"submersion", K::Rank, "x1 + x2^2; x3 + x1", 3, {0.0, 0.0, 0.0}, 0, 2},
      {"cubic_curve", K::Rank, "x1 + x2*x3; (x1 + x2*x3)^3", 3, {0.0, 0.0, 0.0}, 0, 1},
      // critical points for the splitting and Morse lemmas
      {"square", K::Split, "x1^2", 1, {0.0}},
      {"square_cubic", K::Split, "x1^2 + x1^3", 1, {0.0}},
      {"fold_cusp", K::Split, "x1^2 + x2^3", 2, {0.0, 0.0}},
      {"saddle_quartic", K::Split, "x1^2 - x2^2 + x2^4", 2, {0.0, 0.0}},
      {"sphere_xyz", K::Split, "x1^2 + x2^2 + x3^2 + x1*x2*x3", 3, {0.0, 0.0, 0.0}},
      {"mixed_3d", K::Split, "x1^2 - x2^2 + x3^3 + x1*x3^2", 3, {0.0, 0.0, 0.0}},
      {"elliptic_cubic", K::Split, "x1^2 + x1*x2 + x2^2 + x1^3", 2, {0.0, 0.0}},
      {"rotated_fold", K::Split, "(x1 + x2)^2 + x2^4", 2, {0.0, 0.0}},
      {"saddle_quartic_3d", K::Split, "x1^2 - x2^2 + x1*x3^2 + x3^4", 3, {0.0, 0.0, 0.0}},
      {"hyperbolic_cusp", K::Split, "x1*x2 + x3^3", 3, {0.0, 0.0, 0.0}},
      // Morse functions on the unit ball
      {"parabola", K::Morse, "x1^2", 1, {0.0}},
      {"double_well", K::Morse, "x1^4/4 - x1^2/2", 1, {0.0}},
      {"tilted_well", K::Morse, "x1^4 - x1^2 + 0.1*x1", 1, {0.0}},
      {"saddle", K::Morse, "x1^2 - x2^2", 2, {0.0, 0.0}},
      {"cubic_pair", K::Morse, "x1^2 + x2^3 - 0.3*x2", 2, {0.0, 0.0}},
      {"quadric_3d", K::Morse, "x1^2 + 2*x2^2 - x3^2 + 0.5*x1*x3", 3, {0.0, 0.0, 0.0}},
      // degenerate functions for the density construction
      {"cubic", K::Density, "x1^3/3", 1, {0.0}},
      {"monkey", K::Density, "x1^2*x2", 2, {0.0, 0.0}},
  };
  return entries;
}

std::vector<CatalogEntry> catalog_of(CatalogKind kind) {
  std::vector<CatalogEntry> out;
  for (const auto& e : catalog())
    if (e.kind == kind) out.push_back(e);
  return out;
}

const CatalogEntry& find_catalog(std::string_view name) {
  const auto& all = catalog();
  auto it = std::find_if(all.begin(), all.end(), [&](const CatalogEntry& e) { return e.name == name; });
  if (it == all.end()) throw Error(ErrorCode::UnknownCatalogEntry, "no catalog entry named '" + std::string(name) + "'");
  return *it;
}

std::string_view to_string(CatalogKind kind) {
  switch (kind) {
    case CatalogKind::Inverse: return "inverse";
    case CatalogKind::Implicit: return "implicit";
    case CatalogKind::Rank: return "rank";
    case CatalogKind::Split: return "split";
    case CatalogKind::Morse: return "morse";
    case CatalogKind::Density: return "density";
  }
  return "unknown";
}

OraclePtr oracle_of(const CatalogEntry& e) { return parse_oracle(e.fn, e.n); }

}  // namespace singcert
