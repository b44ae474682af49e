#include "kickrot/stats.hpp"

#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "kickrot/params.hpp"

namespace kickrot {

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 32;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Histogram::Histogram(double origin, double width) : origin_(origin), width_(width) {
  if (!(width > 0.0) || !std::isfinite(width))
    throw InvalidParameter("histogram bin width must be > 0");
}

long Histogram::bin_index(double rho) const {
  return static_cast<long>(std::floor((rho - origin_) / width_ + 0.5));
}

void Histogram::add(double rho, double weight) {
  auto& bin = bins_[bin_index(rho)];
  bin.weight += weight;
  bin.moment += weight * rho;
}

void Histogram::merge(const Histogram& other) {
  if (other.origin_ != origin_ || other.width_ != width_)
    throw InvalidParameter("cannot merge histograms with different bin grids");
  for (const auto& [k, bin] : other.bins_) {
    auto& mine = bins_[k];
    mine.weight += bin.weight;
    mine.moment += bin.moment;
  }
}

double Histogram::mass() const {
  double m = 0.0;
  for (const auto& [k, bin] : bins_) m += bin.weight;
  return m;
}

double Histogram::mean() const {
  double m = 0.0, w = 0.0;
  for (const auto& [k, bin] : bins_) {
    m += bin.moment;
    w += bin.weight;
  }
  return w > 0.0 ? m / w : 0.0;
}

void MomentumSeries::resize(std::size_t n) {
  mean_shift.assign(n, 0.0);
  current.assign(n, 0.0);
  sem.assign(n, 0.0);
  second_moment.assign(n, 0.0);
  variance.assign(n, 0.0);
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
  workers = resolve_workers(workers);
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  if (workers > count) workers = static_cast<unsigned>(count);

  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = count * w / workers;
      const std::size_t end = count * (w + 1) / workers;
      pool.emplace_back([&, begin, end] {
        try {
          for (std::size_t i = begin; i < end; ++i) fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace kickrot
