#pragma once

// Neumann cosine-spectral discretization of the interval (0, L).
//
// A field w(x) = w_0 + sum_{k>=1} w_k cos(k pi x / L) is stored by its
// coefficients w_0..w_{N-1}. Node values live on the half-sample points
// x_j = L (j + 1/2) / N, where the forward map is a type-II cosine transform
// and the inverse a type-III transform.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace fastreact {

class Grid {
 public:
  /// Throws ConfigError unless N is a power of two >= 8 and L > 0.
  Grid(double length, std::size_t nodes);

  double length() const noexcept;
  /// Number of collocation nodes N.
  std::size_t size() const noexcept;
  /// Highest retained mode K = N - 1.
  std::size_t max_mode() const noexcept { return size() - 1; }
  /// Node count of the 3/2 zero-padded grid used for products.
  std::size_t padded_size() const noexcept { return 3 * size() / 2; }

  std::span<const double> nodes() const noexcept;
  /// mu_k = (k pi / L)^2 for k = 0..K.
  std::span<const double> mu() const noexcept;
  double mu(std::size_t k) const;

  /// Node samples -> coefficients.
  void forward(std::span<const double> values, std::span<double> coeffs) const;
  /// Coefficients -> node samples.
  void inverse(std::span<const double> coeffs, std::span<double> values) const;
  /// Coefficients -> samples on the padded grid (coefficients above K are zero).
  void inverse_padded(std::span<const double> coeffs, std::span<double> padded_values) const;
  /// Padded samples -> coefficients, truncated back to modes 0..K.
  void forward_padded(std::span<const double> padded_values, std::span<double> coeffs) const;

  /// Two grids are the same if they share length and node count.
  bool operator==(const Grid& other) const noexcept;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

Grid build_grid(double length, std::size_t nodes);

class SpectralField {
 public:
  explicit SpectralField(Grid grid);
  SpectralField(Grid grid, std::vector<double> coeffs);

  static SpectralField from_values(const Grid& grid, std::span<const double> values);
  static SpectralField from_function(const Grid& grid, const std::function<double(double)>& w);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::span<double> coeffs() noexcept { return coeffs_; }
  double operator[](std::size_t k) const { return coeffs_[k]; }
  double& operator[](std::size_t k) { return coeffs_[k]; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  /// Values at the collocation nodes.
  std::vector<double> values() const;
  /// Point evaluation of the cosine series.
  double evaluate(double x) const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);

 private:
  Grid grid_;
  std::vector<double> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

enum class Direction { forward, inverse };

/// Transform in either direction; output length equals input length, which must equal N.
std::vector<double> cosine_transform(const Grid& grid, std::span<const double> input, Direction dir);

/// Sobolev norm of order 0, 1 or 2 computed from the coefficients.
double sobolev_norm(const SpectralField& w, int order);

/// Pointwise map of the values of several fields at one point.
using PointwiseMap = std::function<double(std::span<const double>)>;

/// Evaluates F(fields...) with 3/2 zero padding and truncates back to the grid.
SpectralField nonlinear_eval(std::span<const SpectralField> fields, const PointwiseMap& F);
SpectralField nonlinear_eval(const SpectralField& w, const std::function<double(double)>& F);
SpectralField nonlinear_eval(const SpectralField& u, const SpectralField& v,
                             const std::function<double(double, double)>& F);

/// Fourier symbol of the Neumann Laplacian at mode k, i.e. -mu_k.
double laplacian_symbol(const Grid& grid, std::size_t k);

}  // namespace fastreact
