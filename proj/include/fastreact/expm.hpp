#pragma once

// phi-functions phi_0(z) = e^z, phi_1(z) = (e^z - 1)/z, phi_2(z) = (e^z - 1 - z)/z^2
// for real arguments, and their 2x2 matrix versions.

#include <array>

namespace fastreact {

double phi_fn(int j, double z);
double phi_fn_derivative(int j, double z);

/// Row-major 2x2 matrix.
struct Mat2 {
  double a11 = 0, a12 = 0, a21 = 0, a22 = 0;

  static Mat2 identity() { return {1, 0, 0, 1}; }
  std::array<double, 2> apply(double x, double y) const {
    return {a11 * x + a12 * y, a21 * x + a22 * y};
  }
  Mat2 operator*(const Mat2& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22, a21 * o.a11 + a22 * o.a21,
            a21 * o.a12 + a22 * o.a22};
  }
  Mat2 operator*(double s) const { return {s * a11, s * a12, s * a21, s * a22}; }
  double trace() const { return a11 + a22; }
  double det() const { return a11 * a22 - a12 * a21; }
};

/// Real eigenvalues (larger first). Throws DomainError for a complex pair.
std::array<double, 2> real_eigenvalues(const Mat2& A);

/// phi_j(A) via the Newton form f(z2) I + f[z1, z2] (A - z2 I); falls back to
/// f'((z1 + z2)/2) for the divided difference when |z1 - z2| < 1e-8.
Mat2 phi_matrix(int j, const Mat2& A);

}  // namespace fastreact
