#include "fastreact/expm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fastreact/errors.hpp"

namespace fastreact {

namespace {

constexpr double kSeriesRadius = 0.5;
constexpr int kSeriesTerms = 24;

// sum_{n>=0} z^n / (n + j)!
double phi_series(int j, double z) {
  double fact = 1.0;
  for (int i = 2; i <= j; ++i) fact *= i;
  double term = 1.0 / fact;
  double sum = term;
  for (int n = 1; n < kSeriesTerms; ++n) {
    term *= z / static_cast<double>(n + j);
    sum += term;
  }
  return sum;
}

// sum_{n>=1} n z^{n-1} / (n + j)!
double phi_series_derivative(int j, double z) {
  double fact = 1.0;
  for (int i = 2; i <= j + 1; ++i) fact *= i;
  double coeff = 1.0 / fact;  // 1/(1+j)!
  double zpow = 1.0;
  double sum = 0.0;
  for (int n = 1; n < kSeriesTerms; ++n) {
    sum += static_cast<double>(n) * coeff * zpow;
    coeff /= static_cast<double>(n + 1 + j);
    zpow *= z;
  }
  return sum;
}

void check_order(int j) {
  if (j < 0 || j > 2) throw std::invalid_argument("phi function order must be 0, 1 or 2");
}

}  // namespace

double phi_fn(int j, double z) {
  check_order(j);
  if (j == 0) return std::exp(z);
  if (std::abs(z) < kSeriesRadius) return phi_series(j, z);
  const double e1 = std::expm1(z);
  if (j == 1) return e1 / z;
  return (e1 - z) / (z * z);
}

double phi_fn_derivative(int j, double z) {
  check_order(j);
  if (j == 0) return std::exp(z);
  if (std::abs(z) < kSeriesRadius) return phi_series_derivative(j, z);
  return (phi_fn(j - 1, z) - static_cast<double>(j) * phi_fn(j, z)) / z;
}

std::array<double, 2> real_eigenvalues(const Mat2& A) {
  const double half_tr = 0.5 * A.trace();
  const double half_diff = 0.5 * (A.a11 - A.a22);
  const double disc = half_diff * half_diff + A.a12 * A.a21;
  if (disc < 0) {
    throw DomainError("2x2 generator has complex eigenvalues (discriminant " +
                      std::to_string(disc) + ")");
  }
  const double r = std::sqrt(disc);
  // Avoid cancellation in the smaller-magnitude root.
  const double big = half_tr >= 0 ? half_tr + r : half_tr - r;
  const double det = A.det();
  const double small = big != 0.0 ? det / big : 0.0;
  return big >= small ? std::array{big, small} : std::array{small, big};
}

Mat2 phi_matrix(int j, const Mat2& A) {
  const auto [z1, z2] = real_eigenvalues(A);
  const double f2 = phi_fn(j, z2);
  const double dd = std::abs(z1 - z2) < 1e-8 ? phi_fn_derivative(j, 0.5 * (z1 + z2))
                                             : (phi_fn(j, z1) - f2) / (z1 - z2);
  return {f2 + dd * (A.a11 - z2), dd * A.a12, dd * A.a21, f2 + dd * (A.a22 - z2)};
}

}  // namespace fastreact
