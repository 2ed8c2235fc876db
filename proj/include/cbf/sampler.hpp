#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

#include "cbf/norms.hpp"
#include "cbf/spectral.hpp"

namespace cbf {

struct SamplerOptions {
  int band_limit = 8;
  double slope = 2.0;
  /// Target root-mean-square velocity before the spread factor.
  double amplitude = 1.0;
  /// Each sample's rms is amplitude * spread^s with s uniform in [-1, 1].
  double amplitude_spread = 3.0;
  bool include_mean = false;
  Truncation shape = Truncation::box;
};

namespace detail {

/// Gaussian coefficients with magnitude |m|^{-slope} inside the band, Hermitian-symmetrised.
inline SpectralField random_coefficients(const TorusGrid& grid, int components, std::mt19937_64& rng,
                                         const SamplerOptions& opt) {
  if (opt.band_limit < 0 || opt.band_limit >= grid.nyquist()) {
    throw InvalidArgumentError("sampler: band_limit must lie in [0, n/2)");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField u(grid, components);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Mode m = grid.mode(i);
    long m2 = 0;
    bool inside = true;
    for (int d = 0; d < grid.dim(); ++d) {
      m2 += static_cast<long>(m[d]) * m[d];
      if (std::abs(m[d]) > opt.band_limit) inside = false;
    }
    if (opt.shape == Truncation::ball) inside = m2 <= static_cast<long>(opt.band_limit) * opt.band_limit;
    if (!inside) continue;
    if (m2 == 0) {
      if (opt.include_mean)
        for (int c = 0; c < components; ++c) u[c][i] = normal(rng);
      continue;
    }
    const double mag = std::pow(std::sqrt(static_cast<double>(m2)), -opt.slope);
    for (int c = 0; c < components; ++c) {
      const double re = normal(rng);
      u[c][i] = mag * cplx(re, normal(rng));
    }
  }
  for (int c = 0; c < components; ++c) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const std::size_t j = grid.partner(i);
      if (j < i) continue;
      const cplx avg = 0.5 * (u[c][i] + std::conj(u[c][j]));
      u[c][i] = avg;
      u[c][j] = std::conj(avg);
    }
  }
  return u;
}

inline void scale_to_rms(SpectralField& u, double rms) {
  const double current = std::sqrt(norm_H_sq(u) / u.grid().volume());
  if (current > 0.0) u *= rms / current;
}

}  // namespace detail

/// Reproducible generator of smooth, band-limited, divergence-free test fields.
/// Sample i is drawn from mt19937_64(seed + i), so any sample can be regenerated alone.
class FieldSampler {
 public:
  FieldSampler(const TorusGrid& grid, std::uint64_t seed, SamplerOptions opt = {})
      : grid_(grid), seed_(seed), opt_(opt) {
    if (!(opt_.amplitude >= 0.0)) throw InvalidArgumentError("sampler: amplitude must be >= 0");
    if (!(opt_.amplitude_spread >= 1.0)) throw InvalidArgumentError("sampler: amplitude_spread must be >= 1");
  }

  const TorusGrid& grid() const noexcept { return grid_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const SamplerOptions& options() const noexcept { return opt_; }

  /// Divergence-free vector field for sample `index`.
  SpectralField sample(std::uint64_t index) const {
    auto rng = rng_for(index);
    return draw_vector(rng);
  }

  /// Two independent fields from one sample seed.
  std::pair<SpectralField, SpectralField> pair(std::uint64_t index) const {
    auto rng = rng_for(index);
    SpectralField a = draw_vector(rng);
    SpectralField b = draw_vector(rng);
    return {std::move(a), std::move(b)};
  }

  std::array<SpectralField, 3> triple(std::uint64_t index) const {
    auto rng = rng_for(index);
    SpectralField a = draw_vector(rng);
    SpectralField b = draw_vector(rng);
    SpectralField c = draw_vector(rng);
    return {std::move(a), std::move(b), std::move(c)};
  }

  /// Real scalar field with the same spectrum (not projected).
  SpectralField scalar(std::uint64_t index) const {
    auto rng = rng_for(index);
    SpectralField s = detail::random_coefficients(grid_, 1, rng, opt_);
    detail::scale_to_rms(s, opt_.amplitude * spread(rng));
    return s;
  }

 private:
  std::mt19937_64 rng_for(std::uint64_t index) const { return std::mt19937_64(seed_ + index); }

  double spread(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    return std::pow(opt_.amplitude_spread, uni(rng));
  }

  SpectralField draw_vector(std::mt19937_64& rng) const {
    SpectralField u = leray_project(detail::random_coefficients(grid_, grid_.dim(), rng, opt_));
    detail::scale_to_rms(u, opt_.amplitude * spread(rng));
    return u;
  }

  TorusGrid grid_;
  std::uint64_t seed_;
  SamplerOptions opt_;
};

/// Taylor-Green vortex A (cos kx sin ky, -sin kx cos ky[, 0]) with k = 2 pi / L.
inline SpectralField taylor_green(const TorusGrid& grid, double amplitude = 1.0) {
  const double k = grid.k0();
  auto phys = sample_field(grid, grid.dim(), [&](const std::array<double, 3>& x, std::span<double> out) {
    out[0] = amplitude * std::cos(k * x[0]) * std::sin(k * x[1]);
    out[1] = -amplitude * std::sin(k * x[0]) * std::cos(k * x[1]);
    if (out.size() > 2) out[2] = 0.0;
  });
  return leray_project(to_spectral(phys));
}

}  // namespace cbf
