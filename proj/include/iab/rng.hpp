#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace iab {

// splitmix64; used to whiten (seed, stream, index) triples into engine seeds
// so that every logical stream is independent and reproducible.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random stream. Distributions are implemented explicitly
// (std:: distributions are not bit-stable across standard libraries).
class RngStream {
 public:
  // Sub-seed scheme: engine seed = mix64(mix64(master ^ mix64(stream_id)) ^ index).
  // stream_id separates purposes (topology, channel, trials); index is the
  // per-trial or per-link counter.
  RngStream(std::uint64_t master, std::uint64_t stream_id, std::uint64_t index = 0)
      : eng_(mix64(mix64(master ^ mix64(stream_id)) ^ index)) {}

  std::uint64_t next_u64() { return eng_(); }

  // uniform on [0,1)
  double uniform() { return (eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller (pair drawn each call, second value kept)
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // CN(0,1): independent real/imag parts with variance 1/2
  std::complex<double> cnormal() {
    constexpr double s = 0.70710678118654752440;
    double re = normal() * s;
    double im = normal() * s;
    return {re, im};
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Fixed stream ids (documented so runs are reproducible by construction).
namespace stream {
constexpr std::uint64_t kTopology = 1;
constexpr std::uint64_t kChannel = 2;
constexpr std::uint64_t kTrial = 3;
}  // namespace stream

}  // namespace iab
