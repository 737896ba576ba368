// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace usmb {

using cplx = std::complex<double>;

/// Dense 2-D array indexed (ix, iz): lateral index outer, axial index inner.
/// Each lateral column (fixed ix) is contiguous, which is the natural unit for
/// axial-line processing such as envelope detection.
template <typename T>
class Image2D {
 public:
  Image2D() = default;
  Image2D(std::size_t nx, std::size_t nz, T fill = T{})
      : nx_(nx), nz_(nz), data_(nx * nz, fill) {}

  std::size_t nx() const noexcept { return nx_; }
  std::size_t nz() const noexcept { return nz_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t ix, std::size_t iz) { return data_[ix * nz_ + iz]; }
  const T& operator()(std::size_t ix, std::size_t iz) const { return data_[ix * nz_ + iz]; }

  std::span<T> line(std::size_t ix) { return {data_.data() + ix * nz_, nz_}; }
  std::span<const T> line(std::size_t ix) const { return {data_.data() + ix * nz_, nz_}; }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  bool same_shape(const Image2D& other) const noexcept {
    return nx_ == other.nx_ && nz_ == other.nz_;
  }

  bool operator==(const Image2D&) const = default;

 private:
  std::size_t nx_ = 0;
  std::size_t nz_ = 0;
  std::vector<T> data_;
};

using RealImage = Image2D<double>;
using ComplexImage = Image2D<cplx>;

}  // namespace usmb
