#include "parasharp/phase_kernels.hpp"

#include <cmath>
#include <vector>

namespace parasharp {

void unit_phases(const double* a, std::size_t m, double c, std::complex<double>* out) {
    thread_local std::vector<double> re, im;
    re.resize(m);
    im.resize(m);
    double* pr = re.data();
    double* pi = im.data();
    // separate loops: a fused sincos call would not vectorize
#pragma omp simd
    for (std::size_t j = 0; j < m; ++j) pr[j] = std::cos(c * a[j]);
#pragma omp simd
    for (std::size_t j = 0; j < m; ++j) pi[j] = std::sin(c * a[j]);
    for (std::size_t j = 0; j < m; ++j) out[j] = {pr[j], pi[j]};
}

}  // namespace parasharp
