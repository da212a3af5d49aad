#include "ocm/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ocm/error.hpp"

namespace ocm {

void MarketParams::validate() const {
  if (!(horizon > 0.0)) throw ConfigError("market.horizon", "must be > 0");
  if (!(sigma >= 0.0)) throw ConfigError("market.sigma", "must be >= 0");
  if (!(kappa > 0.0)) throw ConfigError("market.kappa", "must be > 0");
  if (!(eta >= 0.0)) throw ConfigError("market.eta", "must be >= 0");
  if (!(penalty >= 0.0)) throw ConfigError("market.penalty", "must be >= 0");
  if (!(initial_price >= 0.0)) throw ConfigError("market.initial_price", "must be >= 0");
  if (compliance_dates.empty()) {
    throw ConfigError("market.compliance_dates", "at least one date is required");
  }
  double prev = 0.0;
  for (std::size_t l = 0; l < compliance_dates.size(); ++l) {
    if (!(compliance_dates[l] > prev)) {
      throw ConfigError("market.compliance_dates[" + std::to_string(l) + "]",
                        "dates must be positive and strictly increasing");
    }
    prev = compliance_dates[l];
  }
  if (std::abs(compliance_dates.back() - horizon) > 1e-12 * std::max(1.0, horizon)) {
    throw ConfigError("market.compliance_dates", "last date must equal the horizon");
  }
}

void PlayerSpec::validate(std::size_t periods) const {
  if (!(gen_lot > 0.0)) throw ConfigError("gen_lot", "must be > 0");
  if (!(gen_cost >= 0.0)) throw ConfigError("gen_cost", "must be >= 0");
  if (requirements.size() != periods) {
    throw ConfigError("requirements", "expected " + std::to_string(periods) +
                                          " requirement(s), got " +
                                          std::to_string(requirements.size()));
  }
  for (double r : requirements) {
    if (!(r >= 0.0)) throw ConfigError("requirements", "must be >= 0");
  }
}

double penalty_value(double inventory, double requirement, double penalty) noexcept {
  return -penalty * std::max(requirement - inventory, 0.0);
}

BridgeMoments bridge_transition_moments(PriceState state, double dt, double pin, double pin_time,
                                        double sigma) {
  const double remaining = pin_time - state.t;
  if (!(remaining > 0.0)) throw DomainError("bridge transition at or past the pin time");
  if (!(dt > 0.0)) throw DomainError("bridge transition needs dt > 0");
  if (dt > remaining * (1.0 + 1e-12)) throw DomainError("bridge transition overshoots the pin time");
  const double after = std::max(remaining - dt, 0.0);
  return {state.s + dt * (pin - state.s) / remaining, sigma * sigma * dt * after / remaining};
}

PriceState bridge_transition_sample(PriceState state, double dt, double pin, double pin_time,
                                    double sigma, double z) {
  const double remaining = pin_time - state.t;
  const BridgeMoments m = bridge_transition_moments(state, dt, pin, pin_time, sigma);
  // Landing on the pin is exact; floating drift in t must not leave a residual.
  if (std::abs(remaining - dt) <= 1e-12 * std::max(1.0, pin_time)) return {pin_time, pin};
  return {state.t + dt, std::abs(m.mean + std::sqrt(m.variance) * z)};
}

PriceState apply_generation_impact(PriceState state, double total_lot, double eta) noexcept {
  return {state.t, std::abs(state.s - eta * total_lot)};
}

double rollover_inventory(double inventory, double requirement) noexcept {
  return std::max(inventory - requirement, 0.0);
}

}  // namespace ocm
