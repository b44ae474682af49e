#include "kickrot/classical.hpp"

#include <cmath>
#include <string>

#include "kickrot/constants.hpp"
#include "kickrot/rng.hpp"

namespace kickrot::classical {

double reduce_angle(double phi) {
  double r = std::fmod(phi, constants::two_pi);
  if (r < 0.0) r += constants::two_pi;
  // fmod of a tiny negative value can round up to exactly 2π.
  if (r >= constants::two_pi) r = 0.0;
  return r;
}

ClassicalEnsemble sample_initial(std::size_t n, double rho_L, double sigma_p, std::uint64_t seed,
                                 const DimensionlessParams& params) {
  if (n < 1) throw InvalidParameter("ensemble size must be >= 1");
  if (!(sigma_p >= 0.0) || !std::isfinite(sigma_p)) throw InvalidParameter("sigma_p must satisfy sigma_p >= 0");
  if (!std::isfinite(rho_L)) throw InvalidParameter("rho_L must be finite");

  ClassicalEnsemble ens;
  ens.states.resize(n);
  ens.rng_seed = seed;
  ens.params = params;
  ens.initial_mean = rho_L;
  ens.initial_sigma = sigma_p;
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng(seed, i);
    const double angle = constants::two_pi * rng.uniform();
    const double momentum = sigma_p == 0.0 ? rho_L : rho_L + sigma_p * rng.normal();
    ens.states[i] = {angle, momentum};
  }
  return ens;
}

namespace {

struct BlockResult {
  std::vector<double> sum;     // per kick Σ(ρ - ρ_L)
  std::vector<double> sum_sq;  // per kick Σ(ρ - ρ_L)²
  Histogram histogram;
};

}  // namespace

MomentumStats evolve_ensemble(ClassicalEnsemble& ensemble, long n_kicks, const EvolveOptions& options) {
  if (n_kicks < 1) throw InvalidParameter("n_kicks must be >= 1 (got " + std::to_string(n_kicks) + ")");
  if (options.block_size < 1) throw InvalidParameter("block_size must be >= 1");
  const DimensionlessParams params = ensemble.params;
  params.validate_allow_free();

  const std::size_t n = ensemble.states.size();
  if (n < 1) throw InvalidParameter("ensemble is empty");
  const double rho_L = ensemble.initial_mean;
  const double bin_width = options.bin_width > 0.0 ? options.bin_width : params.hbar_eff;
  const std::size_t kicks = static_cast<std::size_t>(n_kicks);
  const long first_kick = ensemble.kick_index + 1;

  const std::size_t n_blocks = (n + options.block_size - 1) / options.block_size;
  std::vector<BlockResult> blocks(n_blocks);

  parallel_for(n_blocks, options.workers, [&](std::size_t blk) {
    const std::size_t begin = blk * options.block_size;
    const std::size_t end = std::min(n, begin + options.block_size);
    auto& out = blocks[blk];
    out.sum.resize(kicks);
    out.sum_sq.resize(kicks);
    std::vector<double> shift(end - begin), shift_sq(end - begin);

    for (std::size_t k = 0; k < kicks; ++k) {
      const long kick = first_kick + static_cast<long>(k);
      for (std::size_t i = begin; i < end; ++i) {
        auto& s = ensemble.states[i];
        s = kick_map_step(s, kick, params, options.parity);
        const double d = s.momentum - rho_L;
        shift[i - begin] = d;
        shift_sq[i - begin] = d * d;
      }
      out.sum[k] = pairwise_sum(shift);
      out.sum_sq[k] = pairwise_sum(shift_sq);
    }
    out.histogram = Histogram(rho_L, bin_width);
    for (std::size_t i = begin; i < end; ++i) out.histogram.add(ensemble.states[i].momentum);
  });

  MomentumStats stats;
  stats.samples = n;
  stats.rho_L = rho_L;
  stats.series.resize(kicks);
  const double count = static_cast<double>(n);
  std::vector<double> partial(n_blocks);
  for (std::size_t k = 0; k < kicks; ++k) {
    for (std::size_t b = 0; b < n_blocks; ++b) partial[b] = blocks[b].sum[k];
    const double mean = pairwise_sum(partial) / count;
    for (std::size_t b = 0; b < n_blocks; ++b) partial[b] = blocks[b].sum_sq[k];
    const double second = pairwise_sum(partial) / count;
    const double var = std::max(0.0, second - mean * mean);
    const long kick = first_kick + static_cast<long>(k);

    stats.series.mean_shift[k] = mean;
    stats.series.current[k] = mean - net_rocking_impulse(kick, params.rocking_amplitude);
    stats.series.second_moment[k] = second;
    stats.series.variance[k] = var;
    stats.series.sem[k] = n > 1 ? std::sqrt(var / (count - 1.0)) : 0.0;
  }
  stats.histogram = Histogram(rho_L, bin_width);
  for (const auto& b : blocks) stats.histogram.merge(b.histogram);

  ensemble.kick_index += n_kicks;
  return stats;
}

}  // namespace kickrot::classical
