#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ocm/banded.hpp"
#include "ocm/market.hpp"

namespace ocm {

// Uniform axis min, min + step, ..., min + (count - 1) step.
struct Axis {
  double min = 0.0;
  double step = 0.1;
  std::size_t count = 2;

  double node(std::size_t i) const noexcept { return min + static_cast<double>(i) * step; }
  double max() const noexcept { return node(count - 1); }
};

// Uniform time grid start = t_0 < ... < t_N = end. `end` is also the pin time of the
// price bridge for the period this grid covers.
struct TimeAxis {
  double start = 0.0;
  double end = 1.0 / 12.0;
  std::size_t steps = 100;

  double dt() const noexcept { return (end - start) / static_cast<double>(steps); }
  double node(std::size_t k) const noexcept {
    return k == steps ? end : start + static_cast<double>(k) * dt();
  }
};

// Difference used for d_x V in the explicit trading term. Central is second order but
// amplifies sawtooth modes where |rate| is large; Upwind takes the forward difference for
// buying and the backward one for selling and is monotone while |rate| dt <= dx.
enum class GradientScheme { Central, Upwind };

const char* to_string(GradientScheme scheme) noexcept;
GradientScheme gradient_scheme_from_string(std::string_view name);  // throws ConfigError

struct GridSpec {
  TimeAxis time;
  Axis inventory;
  Axis price;
  GradientScheme gradient = GradientScheme::Upwind;

  // Throws ConfigError unless steps are positive, the price axis starts at zero and each
  // generation lot and requirement is a whole number of inventory steps.
  void validate(std::span<const PlayerSpec> players) const;
};

// Number of whole inventory steps in `amount`; throws ConfigError when `amount` is not a
// lattice multiple of `step` (relative tolerance 1e-9).
std::size_t lattice_steps(double amount, double step, const char* field);

// Values over (inventory cell, price node) at one time slice. In single-player mode a cell
// is one inventory node; in two-player mode cell = i1 * I + i2.
class Slice {
 public:
  Slice() = default;
  Slice(std::size_t cells, std::size_t prices, double fill = 0.0)
      : cells_(cells), prices_(prices), data_(cells * prices, fill) {}

  std::size_t cells() const noexcept { return cells_; }
  std::size_t prices() const noexcept { return prices_; }

  double& operator()(std::size_t cell, std::size_t j) noexcept { return data_[cell * prices_ + j]; }
  double operator()(std::size_t cell, std::size_t j) const noexcept {
    return data_[cell * prices_ + j];
  }
  std::span<double> row(std::size_t cell) noexcept { return {data_.data() + cell * prices_, prices_}; }
  std::span<const double> row(std::size_t cell) const noexcept {
    return {data_.data() + cell * prices_, prices_};
  }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  friend bool operator==(const Slice&, const Slice&) = default;

 private:
  std::size_t cells_ = 0;
  std::size_t prices_ = 0;
  std::vector<double> data_;
};

// Throws NumericalError naming `what` and slice `k` if any entry is not finite.
void require_finite(const Slice& slice, const char* what, std::size_t k);

enum class SurfaceRole { Value, Continuation, TradeRate, Decision, GenProbability };

const char* to_string(SurfaceRole role) noexcept;

// Implicit-in-price weights (a_j, b_j, c_j) of row j for the step t_k -> t_{k-1}.
struct FdCoefficients {
  double lower;  // a_j
  double diag;   // b_j
  double upper;  // c_j
};

// Throws DomainError when t_{k-1} is at or past the pin time, or k == 0.
FdCoefficients fd_coefficients(std::size_t k, std::size_t j, const MarketParams& market,
                               const GridSpec& grid);

// Explicit right-hand side of the price system for inventory cell `cell`, with the
// inventory gradient taken between cells cell - stride and cell + stride.
double rhs_h_along(const Slice& v_next, std::size_t cell, std::size_t stride, std::size_t j,
                   const MarketParams& market, const GridSpec& grid);

// Trading gain over one step, sup_nu [nu (d_x V - s) - kappa nu^2 / 2] dt, from the
// backward, forward and central differences at one node.
struct InventoryDifferences {
  double backward;
  double forward;
  double central;
};
double trading_gain(const InventoryDifferences& d, double s, double dt, double kappa,
                    GradientScheme scheme) noexcept;
// The maximizing rate of the same problem.
double feedback_rate(const InventoryDifferences& d, double s, double kappa,
                     GradientScheme scheme) noexcept;

// Differences along an inventory line (`index` of `count` nodes, neighbours `stride` cells
// apart). At either end all three collapse to the one-sided difference.
InventoryDifferences inventory_differences(const Slice& v, std::size_t cell, std::size_t stride,
                                           std::size_t index, std::size_t count, std::size_t j,
                                           double dx) noexcept;

// Single-player form: V_{k,i,j} + dt/(2 kappa) * ((V_{k,i+1,j} - V_{k,i-1,j}) / (2 dx) - s_j)^2.
// Throws DomainError for boundary rows i == 0 or i == I - 1.
double rhs_h(const Slice& v_next, std::size_t i, std::size_t j, const MarketParams& market,
             const GridSpec& grid);

// Solves the J x J system whose first and last rows are (1, -2, 1) with zero right-hand
// side and whose interior rows j are (lower[j], diag[j], upper[j]). Entries 0 and J-1 of
// the coefficient vectors and of `rhs` are ignored. Requires J >= 4 (with J = 3 both
// boundary rows coincide).
std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs);

// The factored price system for one backward step k -> k-1; shared by every inventory row.
class PriceSystem {
 public:
  PriceSystem(std::size_t k, const MarketParams& market, const GridSpec& grid);

  std::size_t size() const noexcept { return lu_.size(); }
  // In place: `rhs` holds H (boundary entries are overwritten with 0) and receives U*.
  void solve(std::span<double> rhs) const;

 private:
  BandedLU lu_;
};

// U*_{k-1,i,.} for interior row i, given the complete slice V_k.
std::vector<double> implicit_price_step(std::size_t k, std::size_t i, const Slice& v_next,
                                        const MarketParams& market, const GridSpec& grid);

// d_x v at a node of an inventory line (`index` of `count` nodes, neighbours `stride` cells
// apart): central inside, one-sided at either end.
double inventory_gradient(const Slice& v, std::size_t cell, std::size_t stride, std::size_t index,
                          std::size_t count, std::size_t j, double dx) noexcept;

// Fills the first and last inventory rows by linear extrapolation:
// row 0 = 2 row 1 - row 2, row I-1 = 2 row I-2 - row I-3. Requires I >= 3.
void inventory_extrapolate(Slice& u);

// Same along an arbitrary inventory coordinate: `first` is the cell index of node 0 of the
// line, `stride` the cell distance between neighbours and `count` the line length.
void inventory_extrapolate_line(Slice& u, std::size_t first, std::size_t stride, std::size_t count);

// Linear interpolation weights on the price axis. `upper_weight` multiplies node index + 1.
struct PriceWeights {
  std::size_t index;
  double upper_weight;
};
PriceWeights locate_price(double s, const Axis& price) noexcept;

double interpolate_row(std::span<const double> row, PriceWeights w) noexcept;

// Value at an exact inventory cell and an arbitrary price (linear in s, clamped to the axis).
double shifted_value_lookup(const Slice& surface, std::size_t cell, double s_target,
                            const Axis& price) noexcept;

// Single-player convenience: `x_target` must sit on the inventory lattice.
double shifted_value_lookup(const Slice& surface, double x_target, double s_target,
                            const GridSpec& grid);

}  // namespace ocm
