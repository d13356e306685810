#pragma once

#include <cstddef>
#include <vector>

namespace wlab {

// Scalar field sampled on a periodic n0 x n1 grid, row-major: index(i, j) with
// i along axis 0 and j along axis 1 contiguous.
struct Field2D {
  std::size_t n0 = 0, n1 = 0;
  std::vector<double> a;

  Field2D() = default;
  Field2D(std::size_t rows, std::size_t cols, double fill = 0.0)
      : n0(rows), n1(cols), a(rows * cols, fill) {}

  double& at(std::size_t i, std::size_t j) { return a[i * n1 + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * n1 + j]; }
  double* row(std::size_t i) { return a.data() + i * n1; }
  const double* row(std::size_t i) const { return a.data() + i * n1; }
  std::size_t size() const { return a.size(); }
};

struct FieldStats {
  double max_abs = 0.0;
  double mean_abs = 0.0;
  std::size_t arg_i = 0, arg_j = 0;
};

FieldStats field_stats(const Field2D& f);

Field2D transpose(const Field2D& f);

}  // namespace wlab
