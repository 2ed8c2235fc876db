#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>

#include "cbf/grid.hpp"

namespace cbf::detail {

/// FFTW plans for one (dim, n) shape, operating on an owned aligned buffer.
///
/// Plans are built with FFTW_ESTIMATE so the chosen algorithm (and therefore
/// the rounding) depends only on the shape; transforms are bitwise
/// reproducible for a fixed build.
class FftPlan {
 public:
  FftPlan(int dim, int n) : size_(1) {
    int dims[3] = {n, n, n};
    for (int d = 0; d < dim; ++d) size_ *= static_cast<std::size_t>(n);
    buffer_ = fftw_alloc_complex(size_);
    std::lock_guard<std::mutex> lock(planner_mutex());
    forward_ = fftw_plan_dft(dim, dims, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft(dim, dims, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  ~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(buffer_);
  }

  /// out = (1/N) sum_x in(x) exp(-i k.x)
  void forward(std::span<const double> in, std::span<cplx> out) {
    for (std::size_t i = 0; i < size_; ++i) {
      buffer_[i][0] = in[i];
      buffer_[i][1] = 0.0;
    }
    fftw_execute(forward_);
    const double scale = 1.0 / static_cast<double>(size_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = cplx(buffer_[i][0] * scale, buffer_[i][1] * scale);
  }

  /// out(x) = Re sum_k in(k) exp(i k.x)
  void backward(std::span<const cplx> in, std::span<double> out) {
    for (std::size_t i = 0; i < size_; ++i) {
      buffer_[i][0] = in[i].real();
      buffer_[i][1] = in[i].imag();
    }
    fftw_execute(backward_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = buffer_[i][0];
  }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }

  std::size_t size_;
  fftw_complex* buffer_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

/// Per-thread plan cache keyed by grid shape.
inline FftPlan& plan_for(const TorusGrid& grid) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<FftPlan>> cache;
  auto key = std::make_pair(grid.dim(), grid.n_points());
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<FftPlan>(grid.dim(), grid.n_points())).first;
  }
  return *it->second;
}

}  // namespace cbf::detail
