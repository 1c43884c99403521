#include "cdr/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cdr/error.hpp"

namespace cdr {

SymmetricEigen jacobi_eigen(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  double scale = 0.0;
  for (const auto& row : a) {
    for (double x : row) scale += x * x;
  }
  scale = std::sqrt(scale);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (std::sqrt(off) <= 1e-15 * scale || off == 0.0) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        // Rotation angle that zeroes a[p][q] (Golub & Van Loan, sym. Schur 2x2).
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i][i] > a[j][j]; });
  SymmetricEigen out;
  for (std::size_t i : order) {
    out.values.push_back(a[i][i]);
    std::vector<double> vec(n);
    for (std::size_t k = 0; k < n; ++k) vec[k] = v[k][i];
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

PcaResult pca(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 2) throw DataError("PCA needs at least two rows, got " + std::to_string(rows.size()));
  const std::size_t width = rows.front().size();
  for (const auto& row : rows) {
    if (row.size() != width) throw DataError("PCA input rows differ in length");
    for (double x : row) {
      if (!std::isfinite(x)) throw DataError("PCA input contains a non-finite value");
    }
  }
  const double n = static_cast<double>(rows.size());

  PcaResult r;
  for (std::size_t j = 0; j < width; ++j) {
    double mean = 0.0;
    for (const auto& row : rows) mean += row[j];
    mean /= n;
    double ss = 0.0;
    for (const auto& row : rows) ss += (row[j] - mean) * (row[j] - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      r.dropped.push_back(j);
      continue;
    }
    r.columns.push_back(j);
    r.means.push_back(mean);
    r.scales.push_back(sd);
  }
  const std::size_t p = r.columns.size();
  if (p == 0) throw DataError("every PCA column has zero variance");

  r.standardized.assign(rows.size(), std::vector<double>(p));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < p; ++k) {
      r.standardized[i][k] = (rows[i][r.columns[k]] - r.means[k]) / r.scales[k];
    }
  }

  std::vector<std::vector<double>> cov(p, std::vector<double>(p, 0.0));
  for (const auto& z : r.standardized) {
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = a; b < p; ++b) cov[a][b] += z[a] * z[b];
    }
  }
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a; b < p; ++b) {
      cov[a][b] /= n - 1.0;
      cov[b][a] = cov[a][b];
    }
  }

  auto eig = jacobi_eigen(std::move(cov));
  for (auto& vec : eig.vectors) {
    const auto big = std::max_element(vec.begin(), vec.end(),
                                      [](double x, double y) { return std::abs(x) < std::abs(y); });
    if (*big < 0.0) {
      for (double& x : vec) x = -x;
    }
  }
  r.explained_variance = std::move(eig.values);
  r.components = std::move(eig.vectors);

  r.projections.assign(rows.size(), std::vector<double>(p, 0.0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < p; ++c) {
      double dot = 0.0;
      for (std::size_t k = 0; k < p; ++k) dot += r.standardized[i][k] * r.components[c][k];
      r.projections[i][c] = dot;
    }
  }
  return r;
}

}  // namespace cdr
