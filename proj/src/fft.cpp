#include "arissar/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <vector>

namespace arissar {
namespace {

// FFTW planning is not thread-safe; execution with the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct FftPlan::Impl {
  fftw_plan plan = nullptr;
  bool in_place_only = false;
};

FftPlan::FftPlan(std::size_t length, Direction direction) : length_(length), impl_(std::make_unique<Impl>()) {
  if (length == 0) throw std::invalid_argument("FFT length must be positive");
  std::vector<cd> a(length), b(length);
  std::lock_guard lock(planner_mutex());
  impl_->plan = fftw_plan_dft_1d(static_cast<int>(length), reinterpret_cast<fftw_complex*>(a.data()),
                                 reinterpret_cast<fftw_complex*>(b.data()),
                                 direction == Direction::kForward ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!impl_->plan) throw std::runtime_error("FFTW planning failed");
}

FftPlan::~FftPlan() {
  if (impl_ && impl_->plan) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(impl_->plan);
  }
}

FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

void FftPlan::execute(std::span<const cd> in, std::span<cd> out) const {
  if (in.size() != length_ || out.size() != length_) throw std::invalid_argument("FFT buffer length mismatch");
  if (in.data() == out.data()) {
    // Plan was made out-of-place; route in-place calls through scratch.
    std::vector<cd> scratch(in.begin(), in.end());
    fftw_execute_dft(impl_->plan, reinterpret_cast<fftw_complex*>(scratch.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return;
  }
  fftw_execute_dft(impl_->plan, reinterpret_cast<fftw_complex*>(const_cast<cd*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_shift(std::span<cd> data) {
  std::rotate(data.begin(), data.begin() + static_cast<std::ptrdiff_t>((data.size() + 1) / 2), data.end());
}

void ifft_shift(std::span<cd> data) {
  std::rotate(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(data.size() / 2), data.end());
}

}  // namespace arissar
