#include "ocm/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ocm/error.hpp"

namespace ocm {

BandedLU::BandedLU(std::size_t n, std::size_t lower, std::size_t upper)
    : n_(n),
      lower_(lower),
      upper_(upper),
      width_(2 * lower + upper + 1),
      data_(n * (2 * lower + upper + 1), 0.0),
      pivots_(n, 0) {}

double& BandedLU::at(std::size_t r, std::size_t c) {
  if (r >= n_ || c >= n_ || c + lower_ < r || c > r + upper_) {
    throw DomainError("band matrix entry (" + std::to_string(r) + ", " + std::to_string(c) +
                      ") outside the band");
  }
  factored_ = false;
  return data_[index(r, c)];
}

double BandedLU::at(std::size_t r, std::size_t c) const {
  if (r >= n_ || c >= n_ || !in_storage(r, c)) return 0.0;
  return data_[index(r, c)];
}

void BandedLU::factorize() {
  const std::size_t reach = upper_ + lower_;
  for (std::size_t k = 0; k < n_; ++k) {
    const std::size_t last_row = std::min(n_ - 1, k + lower_);
    const std::size_t last_col = std::min(n_ - 1, k + reach);

    std::size_t pivot = k;
    double best = std::abs(data_[index(k, k)]);
    for (std::size_t r = k + 1; r <= last_row; ++r) {
      const double v = std::abs(data_[index(r, k)]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) {
      throw SingularSystemError("zero pivot in column " + std::to_string(k));
    }
    pivots_[k] = pivot;
    if (pivot != k) {
      for (std::size_t c = k; c <= last_col; ++c) {
        std::swap(data_[index(k, c)], data_[index(pivot, c)]);
      }
    }

    const double diag = data_[index(k, k)];
    for (std::size_t r = k + 1; r <= last_row; ++r) {
      const double factor = data_[index(r, k)] / diag;
      data_[index(r, k)] = factor;
      if (factor == 0.0) continue;
      for (std::size_t c = k + 1; c <= last_col; ++c) {
        data_[index(r, c)] -= factor * data_[index(k, c)];
      }
    }
  }
  factored_ = true;
}

void BandedLU::solve(std::span<double> rhs) const {
  if (!factored_) throw DomainError("BandedLU::solve called before factorize");
  if (rhs.size() != n_) throw DomainError("BandedLU::solve rhs size mismatch");
  const std::size_t reach = upper_ + lower_;

  for (std::size_t k = 0; k < n_; ++k) {
    if (pivots_[k] != k) std::swap(rhs[k], rhs[pivots_[k]]);
    const std::size_t last_row = std::min(n_ - 1, k + lower_);
    for (std::size_t r = k + 1; r <= last_row; ++r) {
      rhs[r] -= data_[index(r, k)] * rhs[k];
    }
  }
  for (std::size_t k = n_; k-- > 0;) {
    const std::size_t last_col = std::min(n_ - 1, k + reach);
    double acc = rhs[k];
    for (std::size_t c = k + 1; c <= last_col; ++c) acc -= data_[index(k, c)] * rhs[c];
    rhs[k] = acc / data_[index(k, k)];
  }
}

}  // namespace ocm
