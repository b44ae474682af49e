#pragma once

namespace kickrot::special {

/// Bessel function of the first kind J_n(x) for integer order 0 <= n <= 64
/// and real |x| <= 1e4. Small arguments use the ascending series; otherwise
/// Miller's backward recurrence normalized by J₀ + 2ΣJ_{2k} = 1.
/// Throws InvalidParameter for negative n, n > 64, non-finite or too large x.
double bessel_j(int n, double x);

}  // namespace kickrot::special
