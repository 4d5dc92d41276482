#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "qwalk/matrix.hpp"

namespace qwalk {

class SpectralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultClusterTol = 1e-8;
inline constexpr double kDefaultSupportTol = 1e-8;

/// Distinct eigenvalues theta_1 < ... < theta_d of a real symmetric matrix
/// with their orthogonal projectors F_j.
class SpectralDecomposition {
 public:
  SpectralDecomposition(std::vector<double> eigenvalues, std::vector<Matrix> projectors,
                        double cluster_tol);

  std::size_t order() const noexcept { return order_; }
  std::size_t distinct() const noexcept { return eigenvalues_.size(); }
  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  double eigenvalue(std::size_t j) const { return eigenvalues_.at(j); }
  const Matrix& projector(std::size_t j) const { return projectors_.at(j); }
  const std::vector<Matrix>& projectors() const noexcept { return projectors_; }
  std::size_t multiplicity(std::size_t j) const;
  double cluster_tol() const noexcept { return cluster_tol_; }
  double spectral_diameter() const noexcept;

  /// sum_j theta_j F_j
  Matrix reconstruct() const;

 private:
  std::size_t order_ = 0;
  std::vector<double> eigenvalues_;
  std::vector<Matrix> projectors_;
  double cluster_tol_;
};

/// Eigenvalues closer than cluster_tol * max(1, spectral diameter) are merged.
/// Throws SpectralError for non-symmetric input, or when two clusters are
/// separated by less than 10 machine epsilons of the spectral scale (the
/// tolerance is then below round-off and merging would be arbitrary).
SpectralDecomposition eigendecompose(const Matrix& m, double cluster_tol = kDefaultClusterTol);

/// Sorted eigenvalues with multiplicity (no clustering).
std::vector<double> eigenvalues_sorted(const Matrix& m);

/// U(t) = exp(i t M) = sum_j exp(i t theta_j) F_j
ComplexMatrix transition_matrix(const SpectralDecomposition& d, double t);

/// Distinct eigenvalues theta_j with ||F_j x|| > support_tol.
std::vector<double> eigenvalue_support(const SpectralDecomposition& d,
                                       std::span<const double> x,
                                       double support_tol = kDefaultSupportTol);
std::vector<std::size_t> support_indices(const SpectralDecomposition& d,
                                         std::span<const double> x,
                                         double support_tol = kDefaultSupportTol);

bool is_fixed_state(const SpectralDecomposition& d, std::span<const double> x,
                    double support_tol = kDefaultSupportTol);

/// c_j = y^T F_j x, so that y^T U(t) x = sum_j c_j exp(i t theta_j).
std::vector<double> projected_overlaps(const SpectralDecomposition& d,
                                       std::span<const double> x,
                                       std::span<const double> y);

}  // namespace qwalk
