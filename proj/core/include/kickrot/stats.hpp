#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace kickrot {

/// Pairwise (cascade) summation. The reduction tree depends only on the
/// length of the input, never on how the data was produced.
double pairwise_sum(std::span<const double> values);

/// Sparse momentum histogram with bins of fixed width centred on
/// origin + k·width. Each bin carries total weight and the weighted sum of
/// momenta, so the distribution mean is recoverable without binning error.
class Histogram {
public:
  struct Bin {
    double weight = 0.0;
    double moment = 0.0;  // Σ weight·ρ
  };

  Histogram() = default;
  Histogram(double origin, double width);

  void add(double rho, double weight = 1.0);
  void merge(const Histogram& other);

  double origin() const { return origin_; }
  double width() const { return width_; }
  double mass() const;
  double mean() const;
  long bin_index(double rho) const;
  double bin_center(long k) const { return origin_ + static_cast<double>(k) * width_; }
  double bin_lo(long k) const { return bin_center(k) - 0.5 * width_; }
  double bin_hi(long k) const { return bin_center(k) + 0.5 * width_; }
  const std::map<long, Bin>& bins() const { return bins_; }

private:
  double origin_ = 0.0;
  double width_ = 1.0;
  std::map<long, Bin> bins_;
};

/// Per-kick momentum statistics. Index k holds the value after kick k+1
/// (and the free flight that follows it).
struct MomentumSeries {
  std::vector<double> mean_shift;     // ⟨ρ - ρ_L⟩
  std::vector<double> current;        // mean_shift minus the net rocking impulse
  std::vector<double> sem;            // standard error of mean_shift
  std::vector<double> second_moment;  // ⟨(ρ - ρ_L)²⟩
  std::vector<double> variance;       // second_moment - mean_shift²

  std::size_t size() const { return mean_shift.size(); }
  void resize(std::size_t n);
};

struct MomentumStats {
  std::size_t samples = 0;  // trajectories or quantum samples
  double rho_L = 0.0;
  MomentumSeries series;
  Histogram histogram;  // after the final kick
};

/// Runs fn(i) for i in [0, count) on `workers` threads with a static
/// partition. fn must write only to slot-i data. workers == 0 selects the
/// hardware concurrency. Exceptions propagate to the caller.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

unsigned resolve_workers(unsigned requested);

}  // namespace kickrot
