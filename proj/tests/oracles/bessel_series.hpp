#pragma once

// Reference J_n(x) from the ascending power series summed in binary128.
// Slow and only meant for tests: Σ_k (-1)^k (x/2)^{2k+n} / (k! (k+n)!).

#include <cmath>

namespace oracle {

__extension__ typedef __float128 quad;

inline double bessel_j_series(int n, double x) {
  if (n < 0) {
    const double v = bessel_j_series(-n, x);
    return (n % 2 != 0) ? -v : v;
  }
  const quad h = static_cast<quad>(x) / 2;
  quad term = 1;
  for (int i = 1; i <= n; ++i) term *= h / i;
  quad sum = term;
  const quad h2 = h * h;
  for (int k = 1; k < 400; ++k) {
    term *= -h2 / (static_cast<quad>(k) * static_cast<quad>(k + n));
    sum += term;
    const quad mag = term < 0 ? -term : term;
    if (k > std::abs(x) && mag < static_cast<quad>(1e-40)) break;
  }
  return static_cast<double>(sum);
}

}  // namespace oracle
