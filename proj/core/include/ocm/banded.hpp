#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ocm {

// LU factorization with partial pivoting of an n x n band matrix with `lower` sub- and
// `upper` super-diagonals. Row interchanges widen the upper band to upper + lower.
// Factor once, then solve for any number of right-hand sides.
class BandedLU {
 public:
  BandedLU() = default;
  BandedLU(std::size_t n, std::size_t lower, std::size_t upper);

  std::size_t size() const noexcept { return n_; }

  // Entry (r, c) of the matrix before factorization; |r - c| must lie inside the band.
  double& at(std::size_t r, std::size_t c);
  double at(std::size_t r, std::size_t c) const;

  // Throws SingularSystemError on an exactly zero pivot.
  void factorize();

  // Solves in place: on entry `rhs`, on exit the solution.
  void solve(std::span<double> rhs) const;

 private:
  std::size_t index(std::size_t r, std::size_t c) const noexcept {
    return r * width_ + (c + lower_ - r);
  }
  bool in_storage(std::size_t r, std::size_t c) const noexcept {
    return c + lower_ >= r && c <= r + upper_ + lower_;
  }

  std::size_t n_ = 0;
  std::size_t lower_ = 0;
  std::size_t upper_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
  std::vector<std::size_t> pivots_;
  bool factored_ = false;
};

}  // namespace ocm
