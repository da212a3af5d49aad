#include "ocm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ocm/error.hpp"

namespace ocm {

double compensated_sum(std::span<const double> values) noexcept {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

std::size_t tail_count(std::size_t n, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("TE level must lie in (0, 1)");
  const double tail = (1.0 - level) * static_cast<double>(n);
  if (tail < 1.0 - 1e-9) {
    throw InsufficientSamplesError("TE at level " + std::to_string(level) + " needs at least " +
                                   std::to_string(static_cast<std::size_t>(std::ceil(1.0 / (1.0 - level) - 1e-9))) +
                                   " samples, got " + std::to_string(n));
  }
  return static_cast<std::size_t>(std::ceil(tail - 1e-9));
}

SimStats describe_samples(std::span<const double> pnl, std::span<const double> generated,
                          double te_level) {
  if (pnl.empty()) throw InsufficientSamplesError("no PnL samples");
  if (generated.size() != pnl.size()) {
    throw DomainError("compute_stats: generated and PnL sample counts differ");
  }
  const std::size_t n = pnl.size();
  const double count = static_cast<double>(n);

  SimStats st;
  st.samples = n;
  st.te_level = te_level;
  st.mean_pnl = compensated_sum(pnl) / count;
  st.mean_generated = compensated_sum(generated) / count;

  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pnl[i] - st.mean_pnl;
    sq[i] = d * d;
  }
  st.se = n > 1 ? std::sqrt(compensated_sum(sq) / (count - 1.0)) / std::sqrt(count) : 0.0;

  std::size_t tail = 0;
  try {
    tail = tail_count(n, te_level);
  } catch (const InsufficientSamplesError&) {
    st.te_available = false;
    st.te = std::numeric_limits<double>::quiet_NaN();
    return st;
  }
  std::vector<double> sorted(pnl.begin(), pnl.end());
  std::sort(sorted.begin(), sorted.end());
  st.te = compensated_sum(std::span<const double>(sorted).first(tail)) / static_cast<double>(tail);
  return st;
}

SimStats compute_stats(std::span<const double> pnl, std::span<const double> generated,
                       double te_level) {
  if (!pnl.empty()) tail_count(pnl.size(), te_level);
  return describe_samples(pnl, generated, te_level);
}

}  // namespace ocm
