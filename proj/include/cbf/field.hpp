#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cbf/grid.hpp"

namespace cbf {

/// Component arrays over a torus grid.
///
/// `Field<double>` holds grid samples, `Field<cplx>` holds Fourier
/// coefficients u(x) = sum_k c_k exp(i k.x). A vector field carries
/// grid.dim() components, a scalar field one. The divergence-free flag is a
/// certificate set by the Leray projection and kept by operations that commute
/// with it; it is only meaningful for spectral vector fields.
template <typename T>
class Field {
 public:
  using value_type = T;

  Field() = default;

  /// Zero-initialised field; `components == 0` means one per dimension.
  explicit Field(const TorusGrid& grid, int components = 0)
      : grid_(grid), data_(static_cast<std::size_t>(components > 0 ? components : grid.dim()),
                           std::vector<T>(grid.size(), T{})) {}

  static Field vector(const TorusGrid& grid) { return Field(grid, grid.dim()); }
  static Field scalar(const TorusGrid& grid) { return Field(grid, 1); }

  const TorusGrid& grid() const noexcept { return grid_; }
  int components() const noexcept { return static_cast<int>(data_.size()); }
  bool is_vector() const noexcept { return components() == grid_.dim(); }
  std::size_t size() const noexcept { return grid_.size(); }

  std::span<T> operator[](int c) noexcept { return data_[static_cast<std::size_t>(c)]; }
  std::span<const T> operator[](int c) const noexcept {
    return data_[static_cast<std::size_t>(c)];
  }

  bool divergence_free() const noexcept { return divergence_free_; }
  void set_divergence_free(bool flag) noexcept { divergence_free_ = flag; }

  Field& operator+=(const Field& other) {
    check_compatible(other, "Field::operator+=");
    for (std::size_t c = 0; c < data_.size(); ++c)
      for (std::size_t i = 0; i < data_[c].size(); ++i) data_[c][i] += other.data_[c][i];
    divergence_free_ = divergence_free_ && other.divergence_free_;
    return *this;
  }

  Field& operator-=(const Field& other) {
    check_compatible(other, "Field::operator-=");
    for (std::size_t c = 0; c < data_.size(); ++c)
      for (std::size_t i = 0; i < data_[c].size(); ++i) data_[c][i] -= other.data_[c][i];
    divergence_free_ = divergence_free_ && other.divergence_free_;
    return *this;
  }

  Field& operator*=(double s) {
    for (auto& comp : data_)
      for (auto& v : comp) v *= s;
    return *this;
  }

  /// this += s * other
  Field& axpy(double s, const Field& other) {
    check_compatible(other, "Field::axpy");
    for (std::size_t c = 0; c < data_.size(); ++c)
      for (std::size_t i = 0; i < data_[c].size(); ++i) data_[c][i] += s * other.data_[c][i];
    divergence_free_ = divergence_free_ && other.divergence_free_;
    return *this;
  }

  bool all_finite() const noexcept {
    for (const auto& comp : data_)
      for (const auto& v : comp)
        if (!finite_value(v)) return false;
    return true;
  }

  friend bool operator==(const Field& a, const Field& b) {
    return a.grid_ == b.grid_ && a.data_ == b.data_;
  }

  void check_compatible(const Field& other, const char* what) const {
    require_same_grid(grid_, other.grid_, what);
    if (other.components() != components()) {
      throw InvalidFieldError(std::string(what) + ": component counts differ");
    }
  }

 private:
  static bool finite_value(double v) noexcept { return std::isfinite(v); }
  static bool finite_value(const cplx& v) noexcept {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  }

  TorusGrid grid_;
  std::vector<std::vector<T>> data_;
  bool divergence_free_ = false;
};

using PhysicalField = Field<double>;
using SpectralField = Field<cplx>;

template <typename T>
Field<T> operator+(Field<T> a, const Field<T>& b) {
  a += b;
  return a;
}

template <typename T>
Field<T> operator-(Field<T> a, const Field<T>& b) {
  a -= b;
  return a;
}

template <typename T>
Field<T> operator*(double s, Field<T> a) {
  a *= s;
  return a;
}

template <typename T>
Field<T> operator*(Field<T> a, double s) {
  a *= s;
  return a;
}

/// Samples a callable f(x, y, z) -> component values on the grid.
/// `fn(point, out)` writes one value per component into `out`.
template <typename Fn>
PhysicalField sample_field(const TorusGrid& grid, int components, Fn&& fn) {
  PhysicalField f(grid, components);
  std::vector<double> values(static_cast<std::size_t>(f.components()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    fn(grid.point(i), std::span<double>(values));
    for (int c = 0; c < f.components(); ++c) f[c][i] = values[static_cast<std::size_t>(c)];
  }
  return f;
}

}  // namespace cbf
