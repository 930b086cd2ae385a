#pragma once

#include "phfem/assembly.hpp"

#include <vector>

namespace phfem
{

// Places sparse blocks into a larger matrix at given offsets.
struct BlockBuilder
{
  std::vector<Eigen::Triplet<double>> t;

  void add(const SparseMatrix & a, Index r0, Index c0, double scale = 1.0)
  {
    for (int k = 0; k < a.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(a, k); it; ++it)
        t.emplace_back(r0 + it.row(), c0 + it.col(), scale * it.value());
  }

  SparseMatrix build(Index rows, Index cols) const
  {
    SparseMatrix m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
  }
};

} // namespace phfem
