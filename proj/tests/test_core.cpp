#include <doctest.h>

#include <atomic>

#include "arissar/core.hpp"
#include "arissar/fft.hpp"
#include "arissar/parallel.hpp"
#include "oracles.hpp"

using namespace arissar;

TEST_CASE("unit conversions") {
  CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
  CHECK(linear_to_db(100.0) == doctest::Approx(20.0));
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watts(-80.0) == doctest::Approx(1e-11));
}

TEST_CASE("random streams are keyed and reproducible") {
  RngStream a(1, StreamKind::kEchoNoise, 7), b(1, StreamKind::kEchoNoise, 7);
  RngStream c(1, StreamKind::kEchoNoise, 8), d(1, StreamKind::kChannelSr, 7);
  const double va = a.uniform();
  CHECK(va == b.uniform());
  CHECK(va != c.uniform());
  CHECK(va != d.uniform());
}

TEST_CASE("complex gaussian has the requested variance") {
  RngStream rng(2, StreamKind::kTest, 0);
  const int n = 200000;
  double p = 0.0, re2 = 0.0;
  cd mean{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    const cd z = rng.complex_gaussian(3.0);
    p += std::norm(z);
    re2 += z.real() * z.real();
    mean += z;
  }
  CHECK(p / n == doctest::Approx(3.0).epsilon(0.02));
  CHECK(re2 / n == doctest::Approx(1.5).epsilon(0.02));
  CHECK(std::abs(mean / double(n)) < 0.02);
}

TEST_CASE("matrix container") {
  CMatrix m(2, 3, cd{1.0, 0.0});
  m(1, 2) = {5.0, -1.0};
  CHECK(m.row(1)[2] == cd{5.0, -1.0});
  CHECK(m.size() == 6);
  CMatrix n = m;
  CHECK(n == m);
  n(0, 0) = 0.0;
  CHECK_FALSE(n == m);
}

TEST_CASE("parallel_for covers every index and propagates errors") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 6) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  CHECK_THROWS_AS(parallel_for(10, 1,
                               [](std::size_t i) {
                                 if (i == 6) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("FFT matches the naive DFT") {
  RngStream rng(3, StreamKind::kTest, 0);
  for (std::size_t n : {1u, 2u, 7u, 64u, 100u}) {
    std::vector<cd> x(n);
    for (auto& v : x) v = rng.complex_gaussian(1.0);
    std::vector<cd> fwd(n), inv(n);
    FftPlan(n, FftPlan::Direction::kForward).execute(x, fwd);
    FftPlan(n, FftPlan::Direction::kInverse).execute(x, inv);
    const auto ref_f = oracle::naive_dft(x, -1);
    const auto ref_i = oracle::naive_dft(x, +1);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(std::abs(fwd[k] - ref_f[k]) < 1e-10);
      CHECK(std::abs(inv[k] - ref_i[k]) < 1e-10);
    }
    // In-place path and round trip.
    std::vector<cd> y = x;
    FftPlan(n, FftPlan::Direction::kForward).execute(y);
    FftPlan(n, FftPlan::Direction::kInverse).execute(y);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(y[k] / double(n) - x[k]) < 1e-12);
  }
}

TEST_CASE("FFT errors and shifts") {
  CHECK_THROWS_AS(FftPlan(0, FftPlan::Direction::kForward), std::invalid_argument);
  FftPlan p(4, FftPlan::Direction::kForward);
  std::vector<cd> a(4), b(5);
  CHECK_THROWS_AS(p.execute(a, b), std::invalid_argument);
  CHECK(next_pow2(1) == 1);
  CHECK(next_pow2(1000) == 1024);
  CHECK(next_pow2(1024) == 1024);
  std::vector<cd> s{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  fft_shift(s);
  CHECK(s[3] == cd{0.0});
  ifft_shift(s);
  CHECK(s[0] == cd{0.0});
  std::vector<cd> o{0.0, 1.0, 2.0, 3.0, 4.0};
  fft_shift(o);
  CHECK(o[2] == cd{0.0});
  ifft_shift(o);
  CHECK(o[0] == cd{0.0});
}
