#pragma once

// Counter-based SplitMix64 streams.
//
// A stream is a 64-bit key plus a counter; output c is fmix(key + c·γ), the
// SplitMix64 sequence started at `key`. Child streams get keys by hashing
// (parent key, index), so Monte Carlo item i draws from stream(seed).child(i)
// no matter which worker runs it or in what order.

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string_view>
#include <thread>
#include <vector>

namespace benford {

inline constexpr std::string_view kGeneratorId = "splitmix64-stream/v1";

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t fmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

class Stream {
 public:
  constexpr explicit Stream(std::uint64_t seed) : key_(detail::fmix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

  /// Independent child stream; depends only on this stream's key and `index`.
  [[nodiscard]] constexpr Stream child(std::uint64_t index) const {
    return Stream(Raw{}, detail::fmix64(key_ ^ detail::fmix64(index + 0xbb67ae8584caa73bULL)));
  }

  constexpr std::uint64_t next_u64() {
    ++counter_;
    return detail::fmix64(key_ + counter_ * detail::kGolden);
  }

  /// Uniform on the open interval (0, 1): 53 random bits, centred in their cell.
  constexpr double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  [[nodiscard]] constexpr std::uint64_t key() const { return key_; }
  [[nodiscard]] constexpr std::uint64_t counter() const { return counter_; }

 private:
  struct Raw {};
  constexpr Stream(Raw, std::uint64_t key) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Worker threads: BENFORD_THREADS if set to a positive integer, else hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("BENFORD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs body(begin, end) over contiguous chunks of [0, n). Rethrows the first exception.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), n / 4096 + 1);
  if (workers <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex m;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, b, e] {
      try {
        body(b, e);
      } catch (...) {
        std::lock_guard lock(m);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace benford
