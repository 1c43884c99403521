#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "cdr/error.hpp"
#include "cdr/pca.hpp"

using namespace cdr;

namespace {
std::vector<std::vector<double>> random_rows(int n, int d, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd mix = Eigen::MatrixXd::NullaryExpr(d, d, [&] { return g(rng); });
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(d, [&] { return g(rng); });
    Eigen::VectorXd y = mix * x;
    for (int j = 0; j < d; ++j) rows[i][j] = y(j) * (j + 1) + 10 * j;
  }
  return rows;
}
}  // namespace

TEST(Jacobi, MatchesEigenSolver) {
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  for (int d : {2, 5, 9}) {
    Eigen::MatrixXd b = Eigen::MatrixXd::NullaryExpr(d, d, [&] { return g(rng); });
    Eigen::MatrixXd a = b * b.transpose();
    std::vector<std::vector<double>> in(d, std::vector<double>(d));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) in[i][j] = a(i, j);
    auto got = jacobi_eigen(in);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    for (int k = 0; k < d; ++k) {
      EXPECT_NEAR(got.values[k], es.eigenvalues()(d - 1 - k), 1e-9 * es.eigenvalues().maxCoeff());
      Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(got.vectors[k].data(), d);
      EXPECT_NEAR(std::abs(v.dot(es.eigenvectors().col(d - 1 - k))), 1.0, 1e-8);
    }
  }
}

TEST(Pca, InvariantsAgainstEigen) {
  auto rows = random_rows(340, 9, 12);
  auto r = pca(rows);
  ASSERT_EQ(r.components.size(), 9u);
  Eigen::MatrixXd x(340, 9);
  for (int i = 0; i < 340; ++i)
    for (int j = 0; j < 9; ++j) x(i, j) = rows[i][j];
  Eigen::MatrixXd z = (x.rowwise() - x.colwise().mean());
  for (int j = 0; j < 9; ++j) z.col(j) /= std::sqrt(z.col(j).squaredNorm() / 339.0);
  Eigen::MatrixXd corr = z.transpose() * z / 339.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr);
  double trace = 0;
  for (int k = 0; k < 9; ++k) {
    EXPECT_NEAR(r.explained_variance[k], es.eigenvalues()(8 - k), 1e-9);
    if (k) EXPECT_GE(r.explained_variance[k - 1], r.explained_variance[k]);
    trace += r.explained_variance[k];
    for (int l = 0; l < 9; ++l) {
      double dot = 0;
      for (int j = 0; j < 9; ++j) dot += r.components[k][j] * r.components[l][j];
      EXPECT_NEAR(dot, k == l ? 1.0 : 0.0, 1e-10);
    }
    // sign convention
    auto big = std::max_element(r.components[k].begin(), r.components[k].end(),
                                [](double a, double b) { return std::abs(a) < std::abs(b); });
    EXPECT_GT(*big, 0.0);
  }
  EXPECT_NEAR(trace, 9.0, 1e-8);
  for (int i = 0; i < 340; ++i) {
    for (int j = 0; j < 9; ++j) {
      EXPECT_NEAR(r.standardized[i][j], z(i, j), 1e-10);
      double back = 0;
      for (int k = 0; k < 9; ++k) back += r.projections[i][k] * r.components[k][j];
      EXPECT_NEAR(back, r.standardized[i][j], 1e-8);
    }
  }
}

TEST(Pca, IdenticalColumnsRankOne) {
  std::mt19937 rng(2);
  std::vector<std::vector<double>> rows(50, std::vector<double>(4));
  for (auto& row : rows) {
    const double v = std::normal_distribution<double>()(rng);
    row = {v, v, v, v};
  }
  auto r = pca(rows);
  EXPECT_NEAR(r.explained_variance[0], 4.0, 1e-10);
  for (int k = 1; k < 4; ++k) EXPECT_LE(std::abs(r.explained_variance[k]), 1e-10);
}

TEST(Pca, CorrelatedCloudAlongDiagonal) {
  std::mt19937 rng(9);
  std::normal_distribution<double> g;
  const double rho = 0.95;
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 500; ++i) {
    const double a = g(rng), b = g(rng);
    rows.push_back({a, rho * a + std::sqrt(1 - rho * rho) * b});
  }
  auto r = pca(rows);
  EXPECT_GE(std::abs(r.components[0][0] + r.components[0][1]) / std::sqrt(2.0), 0.99);
}

TEST(Pca, DropsConstantColumns) {
  auto rows = random_rows(30, 3, 4);
  for (auto& row : rows) row.insert(row.begin() + 1, 5.0);
  auto r = pca(rows);
  EXPECT_EQ(r.dropped, std::vector<std::size_t>{1});
  EXPECT_EQ(r.columns, (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ(r.components.size(), 3u);
}

TEST(Pca, Guards) {
  EXPECT_THROW(pca({{1.0, 2.0}}), DataError);
  EXPECT_THROW(pca({{1.0, 2.0}, {1.0}}), DataError);
  EXPECT_THROW(pca({{1.0, NAN}, {1.0, 2.0}}), DataError);
}
