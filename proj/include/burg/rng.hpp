#pragma once

#include <cmath>
#include <cstdint>

namespace burg {

inline std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Per-stream seed derivation: results depend only on (master, stream), never
// on scheduling or worker count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s = a ^ (stream * 0xd1b54a32d192ed03ull + 0x8bb84b93962eacc9ull);
  splitmix64(s);
  return splitmix64(s);
}

// Small deterministic generator; Gaussians via Box-Muller so draws do not
// depend on standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed) {}
  static Rng for_stream(std::uint64_t master, std::uint64_t stream) {
    return Rng(derive_seed(master, stream));
  }

  std::uint64_t next_u64() { return splitmix64(s_); }

  double uniform01() {  // [0,1)
    return double(next_u64() >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double gaussian() {
    if (have_) {
      have_ = false;
      return cached_;
    }
    double u1;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double c = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(c);
    have_ = true;
    return r * std::cos(c);
  }

 private:
  std::uint64_t s_;
  double cached_ = 0.0;
  bool have_ = false;
};

}  // namespace burg
