#include "texsynth/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace texsynth {

// FFTW plan creation is not thread-safe.
static std::mutex g_plan_mutex;

RealFft::RealFft(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("RealFft: size must be positive");
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  real_buf_ = fftw_alloc_real(n_);
  cplx_buf_ = fftw_alloc_complex(n_ / 2 + 1);
  plan_fwd_ = fftw_plan_dft_r2c_1d(n_, real_buf_, static_cast<fftw_complex*>(cplx_buf_),
                                   FFTW_ESTIMATE);
  plan_inv_ = fftw_plan_dft_c2r_1d(n_, static_cast<fftw_complex*>(cplx_buf_), real_buf_,
                                   FFTW_ESTIMATE);
  if (!plan_fwd_ || !plan_inv_) throw std::runtime_error("RealFft: plan creation failed");
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  fftw_free(real_buf_);
  fftw_free(cplx_buf_);
}

void RealFft::forward(const double* in, std::complex<double>* out) const {
  std::memcpy(real_buf_, in, sizeof(double) * n_);
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  std::memcpy(out, cplx_buf_, sizeof(std::complex<double>) * bins());
}

void RealFft::inverse(const std::complex<double>* in, double* out) const {
  std::memcpy(cplx_buf_, in, sizeof(std::complex<double>) * bins());
  // c2r destroys its input, so the copy above is required anyway.  The DC and
  // Nyquist bins have no imaginary degree of freedom for a real signal.
  auto* c = static_cast<std::complex<double>*>(cplx_buf_);
  c[0] = std::complex<double>(c[0].real(), 0.0);
  if (n_ % 2 == 0) c[n_ / 2] = std::complex<double>(c[n_ / 2].real(), 0.0);
  fftw_execute(static_cast<fftw_plan>(plan_inv_));
  const double inv_n = 1.0 / n_;
  for (int i = 0; i < n_; ++i) out[i] = real_buf_[i] * inv_n;
}

} // namespace texsynth
