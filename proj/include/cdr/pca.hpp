#pragma once

#include <string>
#include <vector>

namespace cdr {

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues are returned in descending order; `vectors[k]` pairs with
/// `values[k]`.
struct SymmetricEigen {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
};

SymmetricEigen jacobi_eigen(std::vector<std::vector<double>> a);

struct PcaResult {
  std::vector<std::size_t> columns;  // retained input columns
  std::vector<std::size_t> dropped;  // zero-variance input columns
  std::vector<double> means;
  std::vector<double> scales;
  std::vector<std::vector<double>> components;  // unit rows, one per component
  std::vector<double> explained_variance;       // descending
  std::vector<std::vector<double>> standardized;
  std::vector<std::vector<double>> projections;
};

/// Standardises each column (sample variance), drops constant columns, and
/// diagonalises the covariance. Each component is signed so that its largest
/// magnitude loading is positive. Throws DataError for fewer than two rows,
/// ragged rows or non-finite entries.
PcaResult pca(const std::vector<std::vector<double>>& rows);

}  // namespace cdr
