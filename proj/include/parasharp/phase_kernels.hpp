#pragma once

#include <complex>
#include <cstddef>

namespace parasharp {

/// out[j] = e^{i c a[j]} for j < m; vectorized sin/cos (a few ulp).
void unit_phases(const double* a, std::size_t m, double c, std::complex<double>* out);

}  // namespace parasharp
