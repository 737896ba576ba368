// SPDX-License-Identifier: Apache-2.0
//
// Self-contained numerical kernels: FFT, Hermitian solve, one-sided Jacobi SVD,
// and power-iteration operator norms for matrix-free linear maps.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "usmb/image.hpp"

namespace usmb::numerics {

/// Column-major dense complex matrix.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static CMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<cplx> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const cplx> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  std::vector<cplx>& data() noexcept { return data_; }
  const std::vector<cplx>& data() const noexcept { return data_; }

  CMatrix adjoint() const;
  double frobenius_norm() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator-(const CMatrix& a, const CMatrix& b);
CMatrix operator+(const CMatrix& a, const CMatrix& b);
std::vector<cplx> operator*(const CMatrix& a, std::span<const cplx> x);

/// Conjugate-linear in the first argument: sum conj(a_i) b_i.
cplx dot(std::span<const cplx> a, std::span<const cplx> b) noexcept;
double norm2(std::span<const cplx> a) noexcept;

/// Unnormalized forward DFT; the inverse carries the 1/N factor. Radix-2 for
/// power-of-two lengths, Bluestein otherwise.
std::vector<cplx> fft(std::span<const cplx> signal, bool inverse = false);

/// Solves (A + loading I) x = b by Cholesky. A must be Hermitian to 1e-10.
/// Throws SingularMatrix when a pivot is not positive after loading.
std::vector<cplx> solve_hermitian(const CMatrix& a, std::span<const cplx> b, double loading = 0.0);

struct SvdResult {
  CMatrix u;                            // M x r, orthonormal columns
  std::vector<double> singular_values;  // length r = min(M, N), descending
  CMatrix v;                            // N x r, orthonormal columns

  CMatrix reconstruct() const;
};

/// Thin SVD via one-sided (Hestenes) Jacobi rotations on a QR-reduced factor.
/// Throws NoConvergence after 60 sweeps.
SvdResult svd(const CMatrix& a);

/// Matrix-free linear map. With real_domain set, inputs are real vectors
/// stored as complex with zero imaginary part, and the adjoint is taken with
/// respect to the real inner product Re<.,.>.
struct LinearOperator {
  std::size_t rows = 0;  // output dimension
  std::size_t cols = 0;  // input dimension
  std::function<void(std::span<const cplx>, std::span<cplx>)> forward;
  std::function<void(std::span<const cplx>, std::span<cplx>)> adjoint;
  bool real_domain = false;

  std::vector<cplx> apply(std::span<const cplx> x) const;
  std::vector<cplx> apply_adjoint(std::span<const cplx> y) const;
};

LinearOperator dense_operator(const CMatrix& a);

/// Randomized inner-product test |<Ax,y> - <x,A^H y>| <= tol * max(1, |<Ax,y>|).
/// Throws AdjointMismatch on failure.
void check_adjoint(const LinearOperator& op, std::uint64_t seed = 0x5eed, double tol = 1e-8);

/// Power iteration on A^H A; returns the raw largest-singular-value estimate.
double spectral_norm_estimate(const LinearOperator& op, int iters, std::uint64_t seed = 0x5eed);

/// Adjoint check, then spectral_norm_estimate scaled by the 1.01 safety factor.
double operator_norm(const LinearOperator& op, int iters, std::uint64_t seed = 0x5eed);

}  // namespace usmb::numerics
