#include "fastreact/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "fastreact/errors.hpp"

namespace fastreact {

namespace {

// fftw planning is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class R2RPlan {
 public:
  R2RPlan(std::size_t n, fftw_r2r_kind kind) : n_(n) {
    std::vector<double> in(n), out(n);
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_r2r_1d(static_cast<int>(n), in.data(), out.data(), kind,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  R2RPlan(const R2RPlan&) = delete;
  R2RPlan& operator=(const R2RPlan&) = delete;
  ~R2RPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }

  void execute(std::span<const double> in, std::span<double> out) const {
    std::vector<double> scratch(in.begin(), in.end());
    fftw_execute_r2r(plan_, scratch.data(), out.data());
  }
  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_;
  fftw_plan plan_;
};

// REDFT10 returns Y_k = 2 sum_j X_j cos(pi k (j+1/2)/n).
void dct2_to_coeffs(const R2RPlan& plan, std::span<const double> values, std::span<double> coeffs) {
  const std::size_t n = plan.size();
  std::vector<double> y(n);
  plan.execute(values, y);
  const std::size_t kept = std::min(coeffs.size(), n);
  coeffs[0] = y[0] / (2.0 * static_cast<double>(n));
  for (std::size_t k = 1; k < kept; ++k) coeffs[k] = y[k] / static_cast<double>(n);
}

// REDFT01 returns Y_j = X_0 + 2 sum_{k>=1} X_k cos(pi k (j+1/2)/n).
void coeffs_to_dct3(const R2RPlan& plan, std::span<const double> coeffs, std::span<double> values) {
  const std::size_t n = plan.size();
  std::vector<double> x(n, 0.0);
  x[0] = coeffs[0];
  for (std::size_t k = 1; k < coeffs.size() && k < n; ++k) x[k] = 0.5 * coeffs[k];
  plan.execute(x, values);
}

}  // namespace

struct Grid::Impl {
  double length;
  std::size_t n;
  std::vector<double> nodes;
  std::vector<double> mu;
  R2RPlan fwd, inv, fwd_pad, inv_pad;

  Impl(double L, std::size_t N)
      : length(L),
        n(N),
        fwd(N, FFTW_REDFT10),
        inv(N, FFTW_REDFT01),
        fwd_pad(3 * N / 2, FFTW_REDFT10),
        inv_pad(3 * N / 2, FFTW_REDFT01) {
    nodes.resize(N);
    mu.resize(N);
    for (std::size_t j = 0; j < N; ++j) {
      nodes[j] = L * (static_cast<double>(j) + 0.5) / static_cast<double>(N);
      const double wave = static_cast<double>(j) * std::numbers::pi / L;
      mu[j] = wave * wave;
    }
  }
};

Grid::Grid(double length, std::size_t nodes) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ConfigError("grid.L: interval length must be positive, got " + std::to_string(length));
  }
  if (nodes < 8 || !std::has_single_bit(nodes)) {
    throw ConfigError("grid.N: node count must be a power of two >= 8, got " +
                      std::to_string(nodes));
  }
  impl_ = std::make_shared<const Impl>(length, nodes);
}

Grid build_grid(double length, std::size_t nodes) { return Grid(length, nodes); }

double Grid::length() const noexcept { return impl_->length; }
std::size_t Grid::size() const noexcept { return impl_->n; }
std::span<const double> Grid::nodes() const noexcept { return impl_->nodes; }
std::span<const double> Grid::mu() const noexcept { return impl_->mu; }

double Grid::mu(std::size_t k) const {
  if (k >= impl_->n) throw std::out_of_range("mode index " + std::to_string(k) + " out of range");
  return impl_->mu[k];
}

bool Grid::operator==(const Grid& other) const noexcept {
  return impl_ == other.impl_ || (impl_->n == other.impl_->n && impl_->length == other.impl_->length);
}

namespace {
void require_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ShapeError(std::string(what) + ": expected length " + std::to_string(want) + ", got " +
                     std::to_string(got));
  }
}
}  // namespace

void Grid::forward(std::span<const double> values, std::span<double> coeffs) const {
  require_length(values.size(), size(), "forward transform input");
  require_length(coeffs.size(), size(), "forward transform output");
  dct2_to_coeffs(impl_->fwd, values, coeffs);
}

void Grid::inverse(std::span<const double> coeffs, std::span<double> values) const {
  require_length(coeffs.size(), size(), "inverse transform input");
  require_length(values.size(), size(), "inverse transform output");
  coeffs_to_dct3(impl_->inv, coeffs, values);
}

void Grid::inverse_padded(std::span<const double> coeffs, std::span<double> padded_values) const {
  require_length(coeffs.size(), size(), "padded inverse input");
  require_length(padded_values.size(), padded_size(), "padded inverse output");
  coeffs_to_dct3(impl_->inv_pad, coeffs, padded_values);
}

void Grid::forward_padded(std::span<const double> padded_values, std::span<double> coeffs) const {
  require_length(padded_values.size(), padded_size(), "padded forward input");
  require_length(coeffs.size(), size(), "padded forward output");
  dct2_to_coeffs(impl_->fwd_pad, padded_values, coeffs);
}

// ---------------------------------------------------------------------------

SpectralField::SpectralField(Grid grid) : grid_(std::move(grid)), coeffs_(grid_.size(), 0.0) {}

SpectralField::SpectralField(Grid grid, std::vector<double> coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  require_length(coeffs_.size(), grid_.size(), "field coefficients");
}

SpectralField SpectralField::from_values(const Grid& grid, std::span<const double> values) {
  SpectralField w(grid);
  grid.forward(values, w.coeffs_);
  return w;
}

SpectralField SpectralField::from_function(const Grid& grid, const std::function<double(double)>& w) {
  std::vector<double> vals(grid.size());
  const auto x = grid.nodes();
  std::transform(x.begin(), x.end(), vals.begin(), w);
  return from_values(grid, vals);
}

std::vector<double> SpectralField::values() const {
  std::vector<double> vals(grid_.size());
  grid_.inverse(coeffs_, vals);
  return vals;
}

double SpectralField::evaluate(double x) const {
  const double scale = std::numbers::pi / grid_.length();
  double sum = coeffs_[0];
  for (std::size_t k = 1; k < coeffs_.size(); ++k) {
    sum += coeffs_[k] * std::cos(static_cast<double>(k) * scale * x);
  }
  return sum;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (!(grid_ == other.grid_)) throw ShapeError("field addition on different grids");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (!(grid_ == other.grid_)) throw ShapeError("field subtraction on different grids");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

std::vector<double> cosine_transform(const Grid& grid, std::span<const double> input, Direction dir) {
  require_length(input.size(), grid.size(), "cosine_transform input");
  std::vector<double> out(grid.size());
  if (dir == Direction::forward) {
    grid.forward(input, out);
  } else {
    grid.inverse(input, out);
  }
  return out;
}

double sobolev_norm(const SpectralField& w, int order) {
  if (order < 0 || order > 2) throw ConfigError("sobolev order must be 0, 1 or 2");
  const double L = w.grid().length();
  const auto mu = w.grid().mu();
  const auto c = w.coeffs();
  double sum = L * c[0] * c[0];
  for (std::size_t k = 1; k < c.size(); ++k) {
    double weight = 1.0;
    if (order >= 1) weight += mu[k];
    if (order >= 2) weight += mu[k] * mu[k];
    sum += 0.5 * L * weight * c[k] * c[k];
  }
  return std::sqrt(sum);
}

SpectralField nonlinear_eval(std::span<const SpectralField> fields, const PointwiseMap& F) {
  if (fields.empty()) throw ShapeError("nonlinear_eval needs at least one field");
  const Grid& grid = fields.front().grid();
  for (const auto& f : fields) {
    if (!(f.grid() == grid)) throw ShapeError("nonlinear_eval: fields live on different grids");
  }
  const std::size_t m = grid.padded_size();
  std::vector<std::vector<double>> padded(fields.size(), std::vector<double>(m));
  for (std::size_t i = 0; i < fields.size(); ++i) grid.inverse_padded(fields[i].coeffs(), padded[i]);

  std::vector<double> point(fields.size());
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < fields.size(); ++i) point[i] = padded[i][j];
    out[j] = F(point);
  }
  SpectralField result(grid);
  grid.forward_padded(out, result.coeffs());
  return result;
}

SpectralField nonlinear_eval(const SpectralField& w, const std::function<double(double)>& F) {
  const Grid& grid = w.grid();
  std::vector<double> padded(grid.padded_size());
  grid.inverse_padded(w.coeffs(), padded);
  for (double& x : padded) x = F(x);
  SpectralField result(grid);
  grid.forward_padded(padded, result.coeffs());
  return result;
}

SpectralField nonlinear_eval(const SpectralField& u, const SpectralField& v,
                             const std::function<double(double, double)>& F) {
  if (!(u.grid() == v.grid())) throw ShapeError("nonlinear_eval: fields live on different grids");
  const Grid& grid = u.grid();
  const std::size_t m = grid.padded_size();
  std::vector<double> pu(m), pv(m);
  grid.inverse_padded(u.coeffs(), pu);
  grid.inverse_padded(v.coeffs(), pv);
  for (std::size_t j = 0; j < m; ++j) pu[j] = F(pu[j], pv[j]);
  SpectralField result(grid);
  grid.forward_padded(pu, result.coeffs());
  return result;
}

double laplacian_symbol(const Grid& grid, std::size_t k) {
  if (k > grid.max_mode()) {
    throw std::out_of_range("laplacian_symbol: mode " + std::to_string(k) + " exceeds K = " +
                            std::to_string(grid.max_mode()));
  }
  return -grid.mu(k);
}

}  // namespace fastreact
