#ifndef GFL_RANDOM_HPP
#define GFL_RANDOM_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace gfl {

// SplitMix64 finalizer, used only to decorrelate (seed, index) pairs.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream for one sample: std::mt19937_64 seeded with
// splitmix64(seed ^ splitmix64(index)). Normal variates come from an explicit
// Box-Muller transform on 53-bit uniforms so the byte stream is fixed by the
// standard engine alone, not by a library's distribution implementation.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index)
      : engine_(splitmix64(seed ^ splitmix64(index))) {}

  // Uniform on (0, 1].
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Complex Gaussian with E z = 0, E z^2 = 0 and E|z|^2 = variance.
  std::complex<double> complex_normal(double variance) {
    const double r = std::sqrt(-variance * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    return {r * std::cos(phi), r * std::sin(phi)};
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gfl

#endif  // GFL_RANDOM_HPP
