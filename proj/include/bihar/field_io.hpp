#pragma once

#include "bihar/grid.hpp"

#include <string>
#include <vector>

namespace bihar {

enum class FieldEncoding { binary, csv };

// Writes <base>.json (grid, field kind, component count, encoding) next to the
// node values in <base>.bin (interleaved little-endian doubles re,im per
// component, component-major) or <base>.csv (node,x,y,z,re0,im0,re1,im1,...).
void write_components(const std::string& base, const Grid& g, const std::string& kind,
                      const std::vector<CVec>& comps, FieldEncoding enc = FieldEncoding::binary);

struct ComponentFile {
    Grid grid;
    std::string kind;
    std::vector<CVec> comps;
};
ComponentFile read_components(const std::string& base);

void write_field(const std::string& base, const ScalarField& f,
                 FieldEncoding enc = FieldEncoding::binary);
void write_field(const std::string& base, const VectorField& f,
                 FieldEncoding enc = FieldEncoding::binary);
void write_field(const std::string& base, const SymMatrixField& f,
                 FieldEncoding enc = FieldEncoding::binary);
ScalarField read_scalar_field(const std::string& base);

}  // namespace bihar
