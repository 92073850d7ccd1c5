#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "arissar/core.hpp"

namespace arissar {

/// One-dimensional complex FFT of fixed length backed by FFTW. A plan is
/// immutable after construction and may be executed concurrently on
/// distinct buffers. The inverse transform is unnormalized.
class FftPlan {
 public:
  enum class Direction { kForward, kInverse };

  FftPlan(std::size_t length, Direction direction);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;

  std::size_t length() const { return length_; }

  /// In-place or out-of-place; both spans must have length() elements.
  void execute(std::span<const cd> in, std::span<cd> out) const;
  void execute(std::span<cd> data) const { execute(data, data); }

 private:
  struct Impl;
  std::size_t length_ = 0;
  std::unique_ptr<Impl> impl_;
};

std::size_t next_pow2(std::size_t n);

/// Swaps the halves of a spectrum so index N/2 holds the zero bin.
void fft_shift(std::span<cd> data);
void ifft_shift(std::span<cd> data);

}  // namespace arissar
