#include "otoc/fft.hpp"

#include <fftw3.h>

#include <cstdlib>
#include <mutex>
#include <stdexcept>

namespace otoc::fft {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

ComplexVector transform(const ComplexVector& in, int sign) {
  const int n = static_cast<int>(in.size());
  ComplexVector out(in.size());
  if (n == 0) return out;
  ComplexVector scratch = in;
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, as_fftw(scratch.data()), as_fftw(out.data()), sign,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

ComplexVector forward(const ComplexVector& in) { return transform(in, FFTW_FORWARD); }
ComplexVector backward(const ComplexVector& in) { return transform(in, FFTW_BACKWARD); }

ComplexVector real_forward(const RealVector& in) {
  const int n = static_cast<int>(in.size());
  if (n == 0) return {};
  RealVector scratch = in;
  ComplexVector out(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, scratch.data(), as_fftw(out.data()), FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

struct MatrixDft::Plans {
  fftw_plan col_fwd, col_bwd, row_fwd, row_bwd;
};

MatrixDft::MatrixDft(Index n) : n_(n) {
  if (n < 1) throw std::invalid_argument("MatrixDft size must be positive");
  // 64-byte aligned buffer
  const std::size_t bytes = (sizeof(fftw_complex) * static_cast<std::size_t>(n * n) + 63) / 64 * 64;
  data_ = static_cast<cplx*>(std::aligned_alloc(64, bytes));
  if (data_ == nullptr) throw std::bad_alloc();
  const int len = static_cast<int>(n);
  fftw_complex* buf = as_fftw(data_);
  plans_ = std::make_unique<Plans>();
  std::lock_guard lock(planner_mutex());
  // Column-major: columns are contiguous (stride 1, distance n); rows have
  // stride n and distance 1.
  unsigned flags = FFTW_ESTIMATE;
  plans_->col_fwd = fftw_plan_many_dft(1, &len, len, buf, nullptr, 1, len, buf, nullptr, 1, len, FFTW_FORWARD, flags);
  plans_->col_bwd = fftw_plan_many_dft(1, &len, len, buf, nullptr, 1, len, buf, nullptr, 1, len, FFTW_BACKWARD, flags);
  plans_->row_fwd = fftw_plan_many_dft(1, &len, len, buf, nullptr, len, 1, buf, nullptr, len, 1, FFTW_FORWARD, flags);
  plans_->row_bwd = fftw_plan_many_dft(1, &len, len, buf, nullptr, len, 1, buf, nullptr, len, 1, FFTW_BACKWARD, flags);
  matrix().setZero();
}

MatrixDft::~MatrixDft() {
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plans_->col_fwd);
    fftw_destroy_plan(plans_->col_bwd);
    fftw_destroy_plan(plans_->row_fwd);
    fftw_destroy_plan(plans_->row_bwd);
  }
  std::free(data_);
}

Eigen::Map<ComplexMatrix> MatrixDft::matrix() { return Eigen::Map<ComplexMatrix>(data_, n_, n_); }

void MatrixDft::columns_forward() { fftw_execute(plans_->col_fwd); }
void MatrixDft::columns_backward() { fftw_execute(plans_->col_bwd); }
void MatrixDft::rows_forward() { fftw_execute(plans_->row_fwd); }
void MatrixDft::rows_backward() { fftw_execute(plans_->row_bwd); }

}  // namespace otoc::fft
