#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace lle {

/// Cached FFTW plan pair for one transform length. Plan creation is serialized
/// internally; execution is safe from any thread.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const noexcept { return n_; }

  /// Unnormalized forward transform, out[m] = sum_j in[j] exp(-2 pi i j m / n).
  void forward(const std::complex<double>* in, std::complex<double>* out) const;
  /// Unnormalized backward transform.
  void backward(const std::complex<double>* in, std::complex<double>* out) const;

 private:
  std::size_t n_;
  void* forward_plan_;
  void* backward_plan_;
};

const FftPlan& fft_plan(std::size_t n);

/// Fourier coefficients normalized so that f(x_j) = sum_m c_m exp(2 pi i m j / n).
Eigen::VectorXcd fft(const Eigen::VectorXcd& values);
Eigen::VectorXcd ifft(const Eigen::VectorXcd& coeffs);

}  // namespace lle
