#include "saddlemg/matrix_market.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "saddlemg/error.hpp"

namespace saddlemg {

void write_matrix_market(std::ostream& out, const CsrMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  out << std::setprecision(17);
  for (int i = 0; i < m.rows(); ++i) {
    auto cols = m.row_cols(i);
    auto vals = m.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) out << i + 1 << ' ' << cols[k] + 1 << ' ' << vals[k] << '\n';
  }
}

CsrMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw Error("matrix market: missing banner");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (object != "matrix" || format != "coordinate" || field != "real")
    throw Error("matrix market: only 'matrix coordinate real' is supported");
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") throw Error("matrix market: unsupported symmetry " + symmetry);
  while (std::getline(in, line) && !line.empty() && line[0] == '%') {
  }
  std::istringstream header(line);
  long rows = 0, cols = 0, nnz = 0;
  if (!(header >> rows >> cols >> nnz)) throw Error("matrix market: bad size line");
  std::vector<Triplet> t;
  t.reserve(symmetric ? 2 * nnz : nnz);
  for (long k = 0; k < nnz; ++k) {
    long i, j;
    double v;
    if (!(in >> i >> j >> v)) throw Error("matrix market: truncated entry list");
    t.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), v});
    if (symmetric && i != j) t.push_back({static_cast<int>(j - 1), static_cast<int>(i - 1), v});
  }
  return CsrMatrix::from_triplets(static_cast<int>(rows), static_cast<int>(cols), t);
}

void write_vector(std::ostream& out, std::span<const double> v) {
  out << std::setprecision(17);
  for (double x : v) out << x << '\n';
}

Vector read_vector(std::istream& in) {
  Vector v;
  double x;
  while (in >> x) v.push_back(x);
  if (!in.eof()) throw Error("vector: malformed value");
  return v;
}

}  // namespace saddlemg
