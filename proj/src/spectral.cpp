#include "qwalk/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qwalk/kernels.hpp"

namespace qwalk {
namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

std::vector<double> apply(const Matrix& f, std::span<const double> x) { return f * x; }

double norm(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

}  // namespace

SpectralDecomposition::SpectralDecomposition(std::vector<double> eigenvalues,
                                             std::vector<Matrix> projectors, double cluster_tol)
    : eigenvalues_(std::move(eigenvalues)),
      projectors_(std::move(projectors)),
      cluster_tol_(cluster_tol) {
  if (eigenvalues_.size() != projectors_.size() || eigenvalues_.empty())
    throw SpectralError("decomposition needs one projector per eigenvalue");
  order_ = projectors_.front().rows();
}

std::size_t SpectralDecomposition::multiplicity(std::size_t j) const {
  return static_cast<std::size_t>(std::lround(projector(j).trace()));
}

double SpectralDecomposition::spectral_diameter() const noexcept {
  return eigenvalues_.back() - eigenvalues_.front();
}

Matrix SpectralDecomposition::reconstruct() const {
  Matrix m(order_, order_);
  for (std::size_t j = 0; j < distinct(); ++j)
    kernels::axpy(eigenvalues_[j], projectors_[j].data(), m.data());
  return m;
}

SpectralDecomposition eigendecompose(const Matrix& m, double cluster_tol) {
  if (!m.is_square() || m.rows() == 0) throw SpectralError("eigendecompose: need a square matrix");
  if (!is_symmetric(m)) throw SpectralError("eigendecompose: matrix is not symmetric");
  if (!(cluster_tol > 0.0)) throw SpectralError("eigendecompose: cluster_tol must be positive");

  const std::size_t n = m.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(m));
  if (solver.info() != Eigen::Success) throw SpectralError("eigendecompose: solver failed");
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::MatrixXd& vectors = solver.eigenvectors();

  const double diameter = values(n - 1) - values(0);
  const double scale = std::max({1.0, std::abs(values(0)), std::abs(values(n - 1))});
  const double merge_gap = cluster_tol * std::max(1.0, diameter);
  const double roundoff_gap = 10.0 * std::numeric_limits<double>::epsilon() * scale;

  // Group consecutive eigenvalues by the gap rule.
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i == n || values(i) - values(i - 1) > merge_gap) {
      if (i < n && values(i) - values(i - 1) < roundoff_gap)
        throw SpectralError("eigendecompose: cluster tolerance below round-off separates eigenvalues " +
                            std::to_string(values(i - 1)) + " and " + std::to_string(values(i)));
      groups.emplace_back(start, i);
      start = i;
    }
  }

  std::vector<double> thetas;
  std::vector<Matrix> projectors;
  thetas.reserve(groups.size());
  projectors.reserve(groups.size());
  for (auto [lo, hi] : groups) {
    double mean = 0.0;
    for (std::size_t i = lo; i < hi; ++i) mean += values(i);
    thetas.push_back(mean / static_cast<double>(hi - lo));

    // F = V V^T with V the n x k block of eigenvectors.
    Matrix v(n, hi - lo);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = lo; c < hi; ++c) v(r, c - lo) = vectors(r, c);
    projectors.push_back(v * v.transpose());
  }
  return SpectralDecomposition(std::move(thetas), std::move(projectors), cluster_tol);
}

std::vector<double> eigenvalues_sorted(const Matrix& m) {
  if (!m.is_square()) throw SpectralError("eigenvalues_sorted: need a square matrix");
  if (!is_symmetric(m)) throw SpectralError("eigenvalues_sorted: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(m), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& values = solver.eigenvalues();
  return {values.data(), values.data() + values.size()};
}

ComplexMatrix transition_matrix(const SpectralDecomposition& d, double t) {
  ComplexMatrix u(d.order(), d.order());
  for (std::size_t j = 0; j < d.distinct(); ++j) {
    const double phase = t * d.eigenvalue(j);
    kernels::axpy(std::cos(phase), d.projector(j).data(), u.re().data());
    kernels::axpy(std::sin(phase), d.projector(j).data(), u.im().data());
  }
  return u;
}

std::vector<std::size_t> support_indices(const SpectralDecomposition& d,
                                         std::span<const double> x, double support_tol) {
  if (x.size() != d.order()) throw SpectralError("support: state dimension mismatch");
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < d.distinct(); ++j)
    if (norm(apply(d.projector(j), x)) > support_tol) idx.push_back(j);
  return idx;
}

std::vector<double> eigenvalue_support(const SpectralDecomposition& d,
                                       std::span<const double> x, double support_tol) {
  std::vector<double> out;
  for (std::size_t j : support_indices(d, x, support_tol)) out.push_back(d.eigenvalue(j));
  return out;
}

bool is_fixed_state(const SpectralDecomposition& d, std::span<const double> x,
                    double support_tol) {
  return support_indices(d, x, support_tol).size() == 1;
}

std::vector<double> projected_overlaps(const SpectralDecomposition& d,
                                       std::span<const double> x, std::span<const double> y) {
  if (x.size() != d.order() || y.size() != d.order())
    throw SpectralError("projected_overlaps: state dimension mismatch");
  std::vector<double> c(d.distinct());
  for (std::size_t j = 0; j < d.distinct(); ++j) c[j] = kernels::dot(y, apply(d.projector(j), x));
  return c;
}

}  // namespace qwalk
