#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace boostlab {

// splitmix64 finalizer; used to derive substream seeds from names.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// mt19937_64 with hand-rolled uniform draws. The standard pins the engine's
// output sequence but not the distributions, so we avoid std::uniform_*
// to keep runs reproducible independent of the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0,1) with 53-bit resolution.
  double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, n); unbiased via rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = gen_();
      if (r >= threshold) return r % n;
    }
  }

  int next_sign() { return (gen_() & 1u) ? 1 : -1; }

 private:
  std::mt19937_64 gen_;
};

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

// Named substreams derived from one master seed. Components draw from their
// own stream, so swapping one component does not perturb the others.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t master) : master_(master) {}

  std::uint64_t derive(std::string_view name) const {
    std::uint64_t h = mix64(master_ ^ 0x6a09e667f3bcc908ULL);
    for (const char c : name) h = mix64(h ^ static_cast<unsigned char>(c));
    return h;
  }

  Rng stream(std::string_view name) const { return Rng(derive(name)); }

  std::uint64_t master() const { return master_; }

 private:
  std::uint64_t master_;
};

}  // namespace boostlab
