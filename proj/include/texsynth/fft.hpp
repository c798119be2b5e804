#pragma once

#include <complex>
#include <vector>

namespace texsynth {

// Real <-> half-spectrum transforms (double precision, FFTW backend).
// Forward: spectrum[k] = sum_n x[n] exp(-2*pi*i*k*n/N), k = 0..N/2.
// Inverse: x[n] = (1/N) * sum over the Hermitian extension of the half
// spectrum; imaginary parts of the DC and Nyquist bins are ignored.
class RealFft {
public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return n_; }
  int bins() const { return n_ / 2 + 1; }

  void forward(const double* in, std::complex<double>* out) const;
  void inverse(const std::complex<double>* in, double* out) const;

private:
  int n_;
  void* plan_fwd_;
  void* plan_inv_;
  double* real_buf_;
  void* cplx_buf_;
};

} // namespace texsynth
