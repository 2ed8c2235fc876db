#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>

#include "cbf/errors.hpp"

namespace cbf {

using cplx = std::complex<double>;

/// Integer wavenumber triple; unused trailing entries are zero in 2D.
using Mode = std::array<int, 3>;

/// Periodic box (R/LZ)^dim sampled on n points per axis.
///
/// Sample j along an axis sits at x = j L / n. Coefficient index i maps to the
/// integer wavenumber m = i for i <= n/2 and m = i - n otherwise, so the
/// retained set per axis is {-n/2+1, ..., n/2}; the physical wavenumber is
/// k = 2 pi m / L. Arrays are row-major with axis 0 slowest.
class TorusGrid {
 public:
  TorusGrid() : TorusGrid(2, 64, 2.0 * std::numbers::pi) {}

  TorusGrid(int dim, int n_points, double period = 2.0 * std::numbers::pi)
      : dim_(dim), n_(n_points), period_(period) {
    if (dim != 2 && dim != 3) {
      throw InvalidArgumentError("TorusGrid: dim must be 2 or 3, got " + std::to_string(dim));
    }
    if (n_points < 8 || n_points % 2 != 0) {
      throw InvalidArgumentError("TorusGrid: n_points must be even and >= 8, got " +
                                 std::to_string(n_points));
    }
    if (!(period > 0.0) || !std::isfinite(period)) {
      throw InvalidArgumentError("TorusGrid: period must be positive and finite");
    }
    size_ = 1;
    for (int d = 0; d < dim_; ++d) size_ *= static_cast<std::size_t>(n_);
  }

  int dim() const noexcept { return dim_; }
  int n_points() const noexcept { return n_; }
  double period() const noexcept { return period_; }
  std::size_t size() const noexcept { return size_; }

  double volume() const noexcept { return std::pow(period_, dim_); }
  double spacing() const noexcept { return period_ / n_; }
  /// Quadrature weight of one grid point (cell volume).
  double cell_volume() const noexcept { return volume() / static_cast<double>(size_); }
  /// Fundamental wavenumber 2 pi / L.
  double k0() const noexcept { return 2.0 * std::numbers::pi / period_; }
  int nyquist() const noexcept { return n_ / 2; }
  /// Largest integer wavenumber kept by the 2/3 rule.
  int dealias_cutoff() const noexcept { return n_ / 3; }

  int wavenumber(int index) const noexcept { return index <= n_ / 2 ? index : index - n_; }
  int index_of(int wavenumber) const noexcept { return ((wavenumber % n_) + n_) % n_; }

  Mode mode(std::size_t flat) const noexcept {
    Mode m{0, 0, 0};
    for (int d = dim_ - 1; d >= 0; --d) {
      m[d] = wavenumber(static_cast<int>(flat % n_));
      flat /= n_;
    }
    return m;
  }

  std::size_t flat_index(const Mode& m) const noexcept {
    std::size_t flat = 0;
    for (int d = 0; d < dim_; ++d) flat = flat * n_ + static_cast<std::size_t>(index_of(m[d]));
    return flat;
  }

  /// Flat index of the mode -m (the Hermitian partner).
  std::size_t partner(std::size_t flat) const noexcept {
    Mode m = mode(flat);
    for (int d = 0; d < dim_; ++d) m[d] = -m[d];
    return flat_index(m);
  }

  std::array<double, 3> point(std::size_t flat) const noexcept {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int d = dim_ - 1; d >= 0; --d) {
      x[d] = static_cast<double>(flat % n_) * spacing();
      flat /= n_;
    }
    return x;
  }

  /// |k|^2 in physical units for integer mode m.
  double k_squared(const Mode& m) const noexcept {
    double s = 0.0;
    for (int d = 0; d < dim_; ++d) s += static_cast<double>(m[d]) * m[d];
    return s * k0() * k0();
  }

  friend bool operator==(const TorusGrid& a, const TorusGrid& b) noexcept {
    return a.dim_ == b.dim_ && a.n_ == b.n_ && a.period_ == b.period_;
  }

  std::string describe() const {
    return std::to_string(dim_) + "D n=" + std::to_string(n_) + " L=" + std::to_string(period_);
  }

 private:
  int dim_;
  int n_;
  double period_;
  std::size_t size_ = 0;
};

inline void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* what) {
  if (!(a == b)) {
    throw IncompatibleGridsError(std::string(what) + ": grids differ (" + a.describe() + " vs " +
                                 b.describe() + ")");
  }
}

}  // namespace cbf
