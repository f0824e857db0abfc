#pragma once

#include <cstddef>
#include <string>

namespace qmetric {

// Resource caps shared by all modules. Defaults can be overridden with the
// QMETRIC_CAP environment variable, either a single integer applied to every
// cap or a comma-separated list such as "group=4096,lattice=1000000".
struct Caps {
  std::size_t matrix_dim = 4096;            // side length of dense matrices
  std::size_t group_elements = 1u << 20;    // exhaustive Weyl group enumeration
  std::size_t lattice_points = 100000000;   // cardinality of lattice sets
  std::size_t denominator = 64;             // common denominator of rational phases
  std::size_t product_set = 10000000;       // unstructured product-set enumeration
};

// Parses an override string on top of `base`. Unknown keys throw PreconditionError.
Caps parse_caps(const std::string& text, Caps base = {});

// Process-wide caps: defaults plus QMETRIC_CAP, read once.
const Caps& default_caps();

}  // namespace qmetric
