#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace tunnel {

enum class FftDirection { forward, backward };

/// Unnormalized 1D complex DFT of fixed length, backed by FFTW.
///
/// forward:  X_k = sum_j x_j exp(-2 pi i j k / N)
/// backward: x_j = sum_k X_k exp(+2 pi i j k / N)
///
/// Plans are built with FFTW_ESTIMATE so results do not depend on timing
/// measurements. `execute` may be called concurrently on distinct buffers.
class FftPlan {
public:
  FftPlan(std::size_t n, FftDirection direction);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&& other) noexcept;
  FftPlan& operator=(FftPlan&& other) noexcept;

  std::size_t size() const { return n_; }

  void execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const;
  void execute_inplace(std::span<std::complex<double>> data) const;

private:
  std::size_t n_ = 0;
  void* plan_ = nullptr;
  void* inplace_plan_ = nullptr;
};

} // namespace tunnel
