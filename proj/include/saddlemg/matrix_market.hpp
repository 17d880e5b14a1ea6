#pragma once

#include <iosfwd>
#include <span>

#include "saddlemg/sparse.hpp"

namespace saddlemg {

/// MatrixMarket "coordinate real general" with 1-based indices, 17 significant digits.
void write_matrix_market(std::ostream& out, const CsrMatrix& m);
CsrMatrix read_matrix_market(std::istream& in);

/// One value per line, 17 significant digits.
void write_vector(std::ostream& out, std::span<const double> v);
Vector read_vector(std::istream& in);

}  // namespace saddlemg
