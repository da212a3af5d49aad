#pragma once

#include <cstddef>
#include <vector>

namespace ocm {

// Market-wide constants shared by every participant.
struct MarketParams {
  double horizon = 1.0 / 12.0;  // T, years
  double sigma = 0.5;           // price volatility, price * yr^-1/2
  double kappa = 0.03;          // quadratic trading friction
  double eta = 0.05;            // price drop per generated OC
  double penalty = 2.5;         // p, per OC of shortfall
  double initial_price = 2.5;   // S_0
  // Ordered compliance dates T_1 < ... < T_L; the last one equals `horizon`.
  std::vector<double> compliance_dates{1.0 / 12.0};

  std::size_t periods() const noexcept { return compliance_dates.size(); }
  double period_start(std::size_t l) const { return l == 0 ? 0.0 : compliance_dates.at(l - 1); }
  double period_end(std::size_t l) const { return compliance_dates.at(l); }

  // Throws ConfigError when an invariant is violated.
  void validate() const;
};

// One regulated firm.
struct PlayerSpec {
  double gen_lot = 0.1;    // xi, OCs per generation event
  double gen_cost = 0.25;  // c, currency per event
  std::vector<double> requirements{5.0};  // R_l, one per compliance date

  double requirement(std::size_t period) const { return requirements.at(period); }
  void validate(std::size_t periods) const;
};

struct PriceState {
  double t = 0.0;
  double s = 0.0;
};

// Terminal penalty G(x) = -p (R - x)_+.
double penalty_value(double inventory, double requirement, double penalty) noexcept;

// Exact one-step transition of a Brownian bridge pinned to `pin` at `pin_time`, driven by
// the standard normal `z`. The result is reflected at zero; at t + dt == pin_time it is
// exactly `pin`. Throws DomainError if pin_time - t <= 0 or dt <= 0 or dt > pin_time - t.
PriceState bridge_transition_sample(PriceState state, double dt, double pin, double pin_time,
                                    double sigma, double z);

// Conditional mean and variance of the same transition (before reflection).
struct BridgeMoments {
  double mean;
  double variance;
};
BridgeMoments bridge_transition_moments(PriceState state, double dt, double pin, double pin_time,
                                        double sigma);

// Price jump caused by `total_lot` freshly generated OCs, reflected at zero.
PriceState apply_generation_impact(PriceState state, double total_lot, double eta) noexcept;

// Inventory carried into the next period after submitting up to `requirement`.
double rollover_inventory(double inventory, double requirement) noexcept;

}  // namespace ocm
