#include "ocm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ocm/error.hpp"

namespace ocm {

std::size_t lattice_steps(double amount, double step, const char* field) {
  const double ratio = amount / step;
  const double rounded = std::round(ratio);
  if (rounded < 0.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio))) {
    throw ConfigError(field, "value " + std::to_string(amount) +
                                 " is not a whole multiple of the inventory step " +
                                 std::to_string(step));
  }
  return static_cast<std::size_t>(rounded);
}

void GridSpec::validate(std::span<const PlayerSpec> players) const {
  if (time.steps < 1) throw ConfigError("grid.time_steps", "must be >= 1");
  if (!(time.end > time.start)) throw ConfigError("grid.time", "end must exceed start");
  if (!(inventory.step > 0.0)) throw ConfigError("grid.dx", "must be > 0");
  if (!(price.step > 0.0)) throw ConfigError("grid.ds", "must be > 0");
  if (inventory.count < 3) throw ConfigError("grid.x", "need at least 3 inventory nodes");
  if (price.count < 4) throw ConfigError("grid.s", "need at least 4 price nodes");
  if (price.min != 0.0) throw ConfigError("grid.s_min", "price axis must start at 0");
  for (const PlayerSpec& p : players) {
    if (lattice_steps(p.gen_lot, inventory.step, "players.gen_lot") == 0) {
      throw ConfigError("players.gen_lot", "must span at least one inventory step");
    }
    for (double r : p.requirements) lattice_steps(r - inventory.min, inventory.step, "players.requirements");
  }
}

void require_finite(const Slice& slice, const char* what, std::size_t k) {
  for (double v : slice.values()) {
    if (!std::isfinite(v)) {
      throw NumericalError(std::string(what) + " diverged at time slice " + std::to_string(k) +
                           "; shrink the time step or the price range");
    }
  }
}

const char* to_string(SurfaceRole role) noexcept {
  switch (role) {
    case SurfaceRole::Value: return "value";
    case SurfaceRole::Continuation: return "continuation";
    case SurfaceRole::TradeRate: return "trade_rate";
    case SurfaceRole::Decision: return "decision";
    case SurfaceRole::GenProbability: return "gen_probability";
  }
  return "unknown";
}

FdCoefficients fd_coefficients(std::size_t k, std::size_t j, const MarketParams& market,
                               const GridSpec& grid) {
  if (k == 0 || k > grid.time.steps) throw DomainError("fd_coefficients: k out of range");
  const double remaining = grid.time.end - grid.time.node(k - 1);
  if (!(remaining > 0.0)) throw DomainError("fd_coefficients: t_{k-1} at the pin time");
  const double dt = grid.time.dt();
  const double ds = grid.price.step;
  const double s = grid.price.node(j);
  const double drift = (market.penalty - s) / (2.0 * ds * remaining);
  const double diffusion = market.sigma * market.sigma / (2.0 * ds * ds);
  return {dt * (drift - diffusion), 1.0 + dt * market.sigma * market.sigma / (ds * ds),
          -dt * (drift + diffusion)};
}

const char* to_string(GradientScheme scheme) noexcept {
  return scheme == GradientScheme::Upwind ? "upwind" : "central";
}

GradientScheme gradient_scheme_from_string(std::string_view name) {
  if (name == "central") return GradientScheme::Central;
  if (name == "upwind") return GradientScheme::Upwind;
  throw ConfigError("grid.gradient", "expected 'central' or 'upwind', got '" + std::string(name) + "'");
}

double trading_gain(const InventoryDifferences& d, double s, double dt, double kappa,
                    GradientScheme scheme) noexcept {
  if (scheme == GradientScheme::Central) {
    const double g = d.central - s;
    return dt / (2.0 * kappa) * g * g;
  }
  const double buy = std::max(d.forward - s, 0.0);
  const double sell = std::min(d.backward - s, 0.0);
  return dt / (2.0 * kappa) * std::max(buy * buy, sell * sell);
}

double feedback_rate(const InventoryDifferences& d, double s, double kappa,
                     GradientScheme scheme) noexcept {
  if (scheme == GradientScheme::Central) return (d.central - s) / kappa;
  const double buy = std::max(d.forward - s, 0.0);
  const double sell = std::min(d.backward - s, 0.0);
  return (buy >= -sell ? buy : sell) / kappa;
}

InventoryDifferences inventory_differences(const Slice& v, std::size_t cell, std::size_t stride,
                                           std::size_t index, std::size_t count, std::size_t j,
                                           double dx) noexcept {
  const double central = inventory_gradient(v, cell, stride, index, count, j, dx);
  if (index == 0 || index + 1 == count) return {central, central, central};
  return {(v(cell, j) - v(cell - stride, j)) / dx, (v(cell + stride, j) - v(cell, j)) / dx, central};
}

double rhs_h_along(const Slice& v_next, std::size_t cell, std::size_t stride, std::size_t j,
                   const MarketParams& market, const GridSpec& grid) {
  const double dx = grid.inventory.step;
  const InventoryDifferences d{(v_next(cell, j) - v_next(cell - stride, j)) / dx,
                               (v_next(cell + stride, j) - v_next(cell, j)) / dx,
                               (v_next(cell + stride, j) - v_next(cell - stride, j)) / (2.0 * dx)};
  return v_next(cell, j) +
         trading_gain(d, grid.price.node(j), grid.time.dt(), market.kappa, grid.gradient);
}

double rhs_h(const Slice& v_next, std::size_t i, std::size_t j, const MarketParams& market,
             const GridSpec& grid) {
  if (i == 0 || i + 1 >= v_next.cells()) {
    throw DomainError("rhs_h: inventory row " + std::to_string(i) + " is a boundary row");
  }
  return rhs_h_along(v_next, i, 1, j, market, grid);
}

namespace {

BandedLU assemble(std::span<const double> lower, std::span<const double> diag,
                  std::span<const double> upper) {
  const std::size_t n = diag.size();
  if (n < 4 || lower.size() != n || upper.size() != n) {
    throw DomainError("price system needs J >= 4 and equal-length coefficient vectors");
  }
  BandedLU lu(n, 2, 2);
  lu.at(0, 0) = 1.0;
  lu.at(0, 1) = -2.0;
  lu.at(0, 2) = 1.0;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    lu.at(j, j - 1) = lower[j];
    lu.at(j, j) = diag[j];
    lu.at(j, j + 1) = upper[j];
  }
  lu.at(n - 1, n - 3) = 1.0;
  lu.at(n - 1, n - 2) = -2.0;
  lu.at(n - 1, n - 1) = 1.0;
  lu.factorize();
  return lu;
}

}  // namespace

std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs) {
  if (rhs.size() != diag.size()) throw DomainError("solve_tridiagonal: rhs size mismatch");
  const BandedLU lu = assemble(lower, diag, upper);
  std::vector<double> x(rhs.begin(), rhs.end());
  x.front() = 0.0;
  x.back() = 0.0;
  lu.solve(x);
  return x;
}

PriceSystem::PriceSystem(std::size_t k, const MarketParams& market, const GridSpec& grid) {
  const std::size_t n = grid.price.count;
  std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const FdCoefficients f = fd_coefficients(k, j, market, grid);
    a[j] = f.lower;
    b[j] = f.diag;
    c[j] = f.upper;
  }
  lu_ = assemble(a, b, c);
}

void PriceSystem::solve(std::span<double> rhs) const {
  rhs.front() = 0.0;
  rhs.back() = 0.0;
  lu_.solve(rhs);
}

std::vector<double> implicit_price_step(std::size_t k, std::size_t i, const Slice& v_next,
                                        const MarketParams& market, const GridSpec& grid) {
  const PriceSystem system(k, market, grid);
  std::vector<double> u(grid.price.count, 0.0);
  for (std::size_t j = 1; j + 1 < u.size(); ++j) u[j] = rhs_h(v_next, i, j, market, grid);
  system.solve(u);
  return u;
}

double inventory_gradient(const Slice& v, std::size_t cell, std::size_t stride, std::size_t index,
                          std::size_t count, std::size_t j, double dx) noexcept {
  if (index == 0) return (v(cell + stride, j) - v(cell, j)) / dx;
  if (index + 1 == count) return (v(cell, j) - v(cell - stride, j)) / dx;
  return (v(cell + stride, j) - v(cell - stride, j)) / (2.0 * dx);
}

void inventory_extrapolate_line(Slice& u, std::size_t first, std::size_t stride, std::size_t count) {
  if (count < 3) throw DomainError("inventory extrapolation needs at least 3 nodes");
  const std::size_t last = first + (count - 1) * stride;
  for (std::size_t j = 0; j < u.prices(); ++j) {
    u(first, j) = 2.0 * u(first + stride, j) - u(first + 2 * stride, j);
    u(last, j) = 2.0 * u(last - stride, j) - u(last - 2 * stride, j);
  }
}

void inventory_extrapolate(Slice& u) { inventory_extrapolate_line(u, 0, 1, u.cells()); }

PriceWeights locate_price(double s, const Axis& price) noexcept {
  double u = (s - price.min) / price.step;
  const double top = static_cast<double>(price.count - 1);
  if (!(u > 0.0)) return {0, 0.0};
  if (u >= top) return {price.count - 1, 0.0};
  const double nearest = std::round(u);
  if (std::abs(u - nearest) < 1e-9) return {static_cast<std::size_t>(nearest), 0.0};
  const double base = std::floor(u);
  return {static_cast<std::size_t>(base), u - base};
}

double interpolate_row(std::span<const double> row, PriceWeights w) noexcept {
  if (w.upper_weight == 0.0) return row[w.index];
  return (1.0 - w.upper_weight) * row[w.index] + w.upper_weight * row[w.index + 1];
}

double shifted_value_lookup(const Slice& surface, std::size_t cell, double s_target,
                            const Axis& price) noexcept {
  return interpolate_row(surface.row(cell), locate_price(s_target, price));
}

double shifted_value_lookup(const Slice& surface, double x_target, double s_target,
                            const GridSpec& grid) {
  const std::size_t i = lattice_steps(x_target - grid.inventory.min, grid.inventory.step, "x_target");
  if (i >= surface.cells()) throw DomainError("shifted_value_lookup: inventory above the grid");
  return shifted_value_lookup(surface, i, s_target, grid.price);
}

}  // namespace ocm
