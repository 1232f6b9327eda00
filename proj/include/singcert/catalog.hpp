#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "singcert/jet_oracle.hpp"

namespace singcert {

enum class CatalogKind { Inverse, Implicit, Rank, Split, Morse, Density };

struct CatalogEntry {
  std::string name;
  CatalogKind kind;
  std::string fn;
  std::size_t n = 1;   // total input dimension
  Vector at;           // base point
  std::size_t m = 0;   // implicit: number of x variables (the rest are y)
  std::size_t p = 0;   // rank: expected rank
};

const std::vector<CatalogEntry>& catalog();
std::vector<CatalogEntry> catalog_of(CatalogKind kind);

// Throws Error(UnknownCatalogEntry).
const CatalogEntry& find_catalog(std::string_view name);

std::string_view to_string(CatalogKind kind);

OraclePtr oracle_of(const CatalogEntry& e);

}  // namespace singcert
