#pragma once

#include <complex>

namespace mdecon {

using cplx = std::complex<double>;

//! log Gamma for complex arguments (Lanczos, g = 7). The imaginary part is
//! only defined modulo 2*pi; exponentiate to get Gamma itself. Arguments
//! with Re(z) < 0.5 are shifted upwards with the recurrence, so the function
//! is defined everywhere except at the non-positive integers.
cplx
lgamma_complex(cplx z);

//! Gamma for complex arguments.
cplx
gamma_complex(cplx z);

} // namespace mdecon
