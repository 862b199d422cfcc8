#pragma once

#include <cstdint>
#include <random>

namespace mdecon {

//! Identifies an independent random stream: replicate r of a run with a
//! given seed, and a sub-stream per random quantity (target, noise, ...).
struct StreamKey
{
  std::uint64_t seed{ 0 };
  std::uint64_t replicate{ 0 };
  std::uint64_t stream{ 0 };
};

//! Seeded generator with portable variate algorithms, so samples depend only
//! on the stream key and not on the standard library in use.
class Rng
{
public:
  explicit Rng(StreamKey key);

  //! uniform on the open interval (0, 1).
  double uniform();
  double normal();
  //! Gamma(shape, rate 1) via Marsaglia-Tsang.
  double gamma(double shape);

private:
  std::mt19937_64 engine_;
};

std::uint64_t
splitmix64(std::uint64_t x);

} // namespace mdecon
