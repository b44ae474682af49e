#include "kickrot/bessel.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "kickrot/params.hpp"

namespace kickrot::special {

namespace {

constexpr int kMaxOrder = 64;
constexpr double kMaxArgument = 1e4;
constexpr double kSeriesLimit = 1.0;
constexpr double kRescaleAbove = 1e250;

// Ascending series Σ (-1)^k (x/2)^{2k+n} / (k! (k+n)!) for 0 <= x <= 1.
double series(int n, double x) {
  const double half = 0.5 * x;
  double term = 1.0;
  for (int k = 1; k <= n; ++k) term *= half / k;
  double sum = term;
  const double q = -half * half;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * (k + n));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1} from a start order well
// beyond both n and x, where the true J is negligible.
double miller(int n, double x) {
  const double big = std::max(static_cast<double>(n), x);
  int start = static_cast<int>(big + 30.0 + 8.0 * std::cbrt(big));
  start += start % 2;  // even, so J_start enters the normalization sum

  const double two_over_x = 2.0 / x;
  double next = 0.0;  // J_{k+1}
  double cur = 1e-300;  // J_k, arbitrary scale
  double norm = 0.0;    // 2 Σ J_{2j}, j >= 1, plus J_0 at the end
  double result = 0.0;
  for (int k = start; k > 0; --k) {
    const double prev = k * two_over_x * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    if (k - 1 == n) result = cur;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
    if (std::abs(cur) > kRescaleAbove) {
      cur /= kRescaleAbove;
      next /= kRescaleAbove;
      norm /= kRescaleAbove;
      result /= kRescaleAbove;
    }
  }
  norm += cur;  // J_0
  return result / norm;
}

}  // namespace

double bessel_j(int n, double x) {
  if (n < 0 || n > kMaxOrder)
    throw InvalidParameter("bessel order must satisfy 0 <= n <= 64 (got " + std::to_string(n) + ")");
  if (!std::isfinite(x)) throw InvalidParameter("bessel argument must be finite");
  if (std::abs(x) > kMaxArgument)
    throw InvalidParameter("bessel argument must satisfy |x| <= 1e4");

  const double ax = std::abs(x);
  double value;
  if (ax == 0.0) {
    value = (n == 0) ? 1.0 : 0.0;
  } else if (ax <= kSeriesLimit) {
    value = series(n, ax);
  } else {
    value = miller(n, ax);
  }
  return (x < 0.0 && (n % 2) != 0) ? -value : value;
}

}  // namespace kickrot::special
