#include "mdecon/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mdecon {

namespace {

constexpr double lanczos_g = 7.0;
constexpr std::array<double, 9> lanczos_coef = {
  0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
  771.32342877765313,      -176.61502916214059,   12.507343278686905,
  -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7
};

// valid for Re(z) >= 0.5
cplx
lanczos_lgamma(cplx z)
{
  z -= 1.0;
  cplx x = lanczos_coef[0];
  for (std::size_t i = 1; i < lanczos_coef.size(); ++i) {
    x += lanczos_coef[i] / (z + static_cast<double>(i));
  }
  const cplx t = z + lanczos_g + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
         std::log(x);
}

} // namespace

cplx
lgamma_complex(cplx z)
{
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) {
    throw std::domain_error("lgamma_complex: pole at non-positive integer");
  }
  cplx shift = 0.0;
  while (z.real() < 0.5) {
    shift -= std::log(z);
    z += 1.0;
  }
  return lanczos_lgamma(z) + shift;
}

cplx
gamma_complex(cplx z)
{
  return std::exp(lgamma_complex(z));
}

} // namespace mdecon
