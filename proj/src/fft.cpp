#include "lle/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

namespace lle {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(const std::complex<double>* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(p));
}

}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
  std::lock_guard lock(planner_mutex());
  auto* in = fftw_alloc_complex(n);
  auto* out = fftw_alloc_complex(n);
  const int len = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_1d(len, in, out, FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_dft_1d(len, in, out, FFTW_BACKWARD, flags);
  fftw_free(in);
  fftw_free(out);
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void FftPlan::forward(const std::complex<double>* in, std::complex<double>* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(in), as_fftw(out));
}

void FftPlan::backward(const std::complex<double>* in, std::complex<double>* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(in), as_fftw(out));
}

const FftPlan& fft_plan(std::size_t n) {
  static std::mutex cache_mutex;
  static std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftPlan>(n);
  return *slot;
}

Eigen::VectorXcd fft(const Eigen::VectorXcd& values) {
  const auto n = static_cast<std::size_t>(values.size());
  Eigen::VectorXcd out(values.size());
  fft_plan(n).forward(values.data(), out.data());
  out /= static_cast<double>(n);
  return out;
}

Eigen::VectorXcd ifft(const Eigen::VectorXcd& coeffs) {
  const auto n = static_cast<std::size_t>(coeffs.size());
  Eigen::VectorXcd out(coeffs.size());
  fft_plan(n).backward(coeffs.data(), out.data());
  return out;
}

}  // namespace lle
