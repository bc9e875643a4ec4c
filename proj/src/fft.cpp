#include "tunnel/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tunnel/errors.hpp"

namespace tunnel {
namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

} // namespace

FftPlan::FftPlan(std::size_t n, FftDirection direction) : n_(n) {
  if (n == 0) throw InvalidParameter("FFT length must be positive");
  const int sign = direction == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD;
  std::vector<std::complex<double>> a(n), b(n);
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(a.data()), as_fftw(b.data()), sign,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
  inplace_plan_ = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(a.data()), as_fftw(a.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan_ || !inplace_plan_) throw std::runtime_error("FFTW planning failed");
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  if (plan_) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  if (inplace_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inplace_plan_));
}

FftPlan::FftPlan(FftPlan&& other) noexcept
    : n_(std::exchange(other.n_, 0)),
      plan_(std::exchange(other.plan_, nullptr)),
      inplace_plan_(std::exchange(other.inplace_plan_, nullptr)) {}

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept {
  if (this != &other) {
    std::swap(n_, other.n_);
    std::swap(plan_, other.plan_);
    std::swap(inplace_plan_, other.inplace_plan_);
  }
  return *this;
}

void FftPlan::execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
  if (in.size() != n_ || out.size() != n_) throw InvalidParameter("FFT buffer length mismatch");
  // FFTW takes a non-const input pointer but leaves out-of-place input untouched.
  auto* src = const_cast<std::complex<double>*>(in.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_), as_fftw(src), as_fftw(out.data()));
}

void FftPlan::execute_inplace(std::span<std::complex<double>> data) const {
  if (data.size() != n_) throw InvalidParameter("FFT buffer length mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(inplace_plan_), as_fftw(data.data()), as_fftw(data.data()));
}

} // namespace tunnel
