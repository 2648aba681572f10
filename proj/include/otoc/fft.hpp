#pragma once

#include "otoc/types.hpp"

#include <memory>

// Thin FFTW wrappers. All transforms are unnormalized:
//   forward:  y_k = sum_j x_j exp(-2 pi i j k / n)
//   backward: y_k = sum_j x_j exp(+2 pi i j k / n)
namespace otoc::fft {

ComplexVector forward(const ComplexVector& in);
ComplexVector backward(const ComplexVector& in);

/// One-sided transform of a real signal: n/2 + 1 bins.
ComplexVector real_forward(const RealVector& in);

/// Square complex matrix stored in an FFTW-aligned buffer with planned
/// batched transforms along columns and rows. Plans are made once, so a
/// workspace should be reused across iterations.
class MatrixDft {
 public:
  explicit MatrixDft(Index n);
  ~MatrixDft();
  MatrixDft(const MatrixDft&) = delete;
  MatrixDft& operator=(const MatrixDft&) = delete;

  Index size() const { return n_; }
  Eigen::Map<ComplexMatrix> matrix();

  void columns_forward();
  void columns_backward();
  void rows_forward();
  void rows_backward();

 private:
  struct Plans;
  Index n_;
  cplx* data_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace otoc::fft
