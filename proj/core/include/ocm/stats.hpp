#pragma once

#include <cstddef>
#include <span>

namespace ocm {

struct SimStats {
  double mean_pnl = 0.0;
  double te = 0.0;  // mean of the worst ceil((1 - level) N) samples
  bool te_available = true;
  double se = 0.0;  // sample stdev / sqrt(N)
  double mean_generated = 0.0;
  std::size_t samples = 0;
  double te_level = 0.95;
};

// Neumaier-compensated sum; independent of thread scheduling because callers pass the
// samples in path order.
double compensated_sum(std::span<const double> values) noexcept;

// Number of tail samples averaged by the TE at `level`; throws InsufficientSamplesError
// when (1 - level) N < 1 and DomainError for a level outside (0, 1).
std::size_t tail_count(std::size_t n, double level);

// As compute_stats, but leaves te_available false (and te NaN) instead of throwing when
// the tail would be empty.
SimStats describe_samples(std::span<const double> pnl, std::span<const double> generated,
                          double te_level = 0.95);

// Throws InsufficientSamplesError when the TE tail would be empty (N < 20 at 95%).
SimStats compute_stats(std::span<const double> pnl, std::span<const double> generated,
                       double te_level = 0.95);

}  // namespace ocm
