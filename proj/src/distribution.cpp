// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "aht/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "aht/error.hpp"

namespace aht {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_nonneg_integer(double y) noexcept {
  return std::isfinite(y) && y >= 0.0 && std::floor(y) == y;
}

double log_sum_exp(std::span<const double> terms) {
  double hi = kNegInf;
  for (double t : terms) hi = std::max(hi, t);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - hi);
  return hi + std::log(acc);
}

}  // namespace

DistributionSpec DistributionSpec::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw DomainError(fmt::format("exponential rate must be finite and > 0, got {}", rate));
  }
  return DistributionSpec(DistributionKind::Exponential, rate, {});
}

DistributionSpec DistributionSpec::geometric(double success) {
  if (!(success > 0.0 && success < 1.0)) {
    throw DomainError(fmt::format("geometric success probability must lie in (0,1), got {}", success));
  }
  return DistributionSpec(DistributionKind::Geometric, success, {});
}

DistributionSpec DistributionSpec::tabulated(std::vector<double> probs) {
  if (probs.empty()) throw DomainError("tabulated law needs at least one probability");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw DomainError(fmt::format("tabulated probabilities must be finite and >= 0, got {}", p));
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError(fmt::format("tabulated probabilities must sum to 1 (within 1e-12), got {:.17g}", total));
  }
  DistributionSpec spec(DistributionKind::Tabulated, 0.0, std::move(probs));
  spec.cumulative_.resize(spec.probs_.size());
  std::partial_sum(spec.probs_.begin(), spec.probs_.end(), spec.cumulative_.begin());
  return spec;
}

bool DistributionSpec::in_domain(double y) const noexcept {
  switch (kind_) {
    case DistributionKind::Exponential:
      return std::isfinite(y) && y >= 0.0;
    case DistributionKind::Geometric:
      return is_nonneg_integer(y);
    case DistributionKind::Tabulated:
      // The sample space is all of N; the table lists the leading masses.
      return is_nonneg_integer(y);
  }
  return false;
}

double DistributionSpec::density(double y) const {
  if (!in_domain(y)) {
    throw DomainError(fmt::format("observation {} lies outside the support of {}", y, describe()));
  }
  switch (kind_) {
    case DistributionKind::Exponential:
      return param_ * std::exp(-param_ * y);
    case DistributionKind::Geometric:
      return std::exp(log_density(y));
    case DistributionKind::Tabulated:
      return y < static_cast<double>(probs_.size()) ? probs_[static_cast<std::size_t>(y)] : 0.0;
  }
  return 0.0;
}

double DistributionSpec::log_density(double y) const {
  if (!in_domain(y)) {
    throw DomainError(fmt::format("observation {} lies outside the support of {}", y, describe()));
  }
  switch (kind_) {
    case DistributionKind::Exponential:
      return std::log(param_) - param_ * y;
    case DistributionKind::Geometric:
      return std::log(param_) + y * std::log1p(-param_);
    case DistributionKind::Tabulated: {
      const double p = y < static_cast<double>(probs_.size()) ? probs_[static_cast<std::size_t>(y)] : 0.0;
      return p > 0.0 ? std::log(p) : kNegInf;
    }
  }
  return kNegInf;
}

double DistributionSpec::cdf(double y) const {
  if (y < 0.0) return 0.0;
  switch (kind_) {
    case DistributionKind::Exponential:
      return -std::expm1(-param_ * y);
    case DistributionKind::Geometric:
      return -std::expm1((std::floor(y) + 1.0) * std::log1p(-param_));
    case DistributionKind::Tabulated: {
      const auto k = static_cast<std::size_t>(std::floor(y));
      return k >= cumulative_.size() ? 1.0 : std::min(1.0, cumulative_[k]);
    }
  }
  return 0.0;
}

double DistributionSpec::mean() const noexcept {
  switch (kind_) {
    case DistributionKind::Exponential:
      return 1.0 / param_;
    case DistributionKind::Geometric:
      return (1.0 - param_) / param_;
    case DistributionKind::Tabulated: {
      double m = 0.0;
      for (std::size_t k = 0; k < probs_.size(); ++k) m += static_cast<double>(k) * probs_[k];
      return m;
    }
  }
  return 0.0;
}

double DistributionSpec::upper_quantile(double tail) const {
  switch (kind_) {
    case DistributionKind::Exponential:
      return -std::log(tail) / param_;
    case DistributionKind::Geometric:
      // P(Y > k) = (1 - theta)^(k + 1)
      return std::max(0.0, std::ceil(std::log(tail) / std::log1p(-param_) - 1.0));
    case DistributionKind::Tabulated:
      return static_cast<double>(probs_.size() - 1);
  }
  return 0.0;
}

double DistributionSpec::sample_tabulated(double u) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) {
    // u landed in the rounding gap above the last partial sum; take the last
    // cell with positive mass.
    for (std::size_t k = probs_.size(); k-- > 0;) {
      if (probs_[k] > 0.0) return static_cast<double>(k);
    }
  }
  return static_cast<double>(it - cumulative_.begin());
}

std::string DistributionSpec::describe() const {
  switch (kind_) {
    case DistributionKind::Exponential:
      return fmt::format("Exp(rate={})", param_);
    case DistributionKind::Geometric:
      return fmt::format("Geom(success={})", param_);
    case DistributionKind::Tabulated:
      return fmt::format("Tabulated(n={})", probs_.size());
  }
  return "?";
}

double mixture_density(double r, const DistributionSpec& f, const DistributionSpec& g, double y) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw DomainError(fmt::format("mixture weight must lie in [0,1], got {}", r));
  }
  const double fy = f.density(y);
  const double gy = g.density(y);
  return r * fy + (1.0 - r) * gy;
}

Mixture::Mixture(const DistributionSpec& law) : components_{{1.0, law}} {}

Mixture::Mixture(std::vector<Component> components) : components_(std::move(components)) {
  if (components_.empty()) throw DomainError("mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight >= 0.0)) throw DomainError("mixture weights must be >= 0");
    if (c.law.space() != components_.front().law.space()) {
      throw DomainError("mixture components must share one sample space");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DomainError(fmt::format("mixture weights must sum to 1, got {:.17g}", total));
  }
}

Mixture Mixture::two_point(double r, const DistributionSpec& f, const DistributionSpec& g) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError(fmt::format("mixture weight must lie in [0,1], got {}", r));
  if (r == 1.0) return Mixture(f);
  if (r == 0.0) return Mixture(g);
  return Mixture(std::vector<Component>{{r, f}, {1.0 - r, g}});
}

Mixture Mixture::combine(std::span<const std::pair<double, Mixture>> parts) {
  std::vector<Component> flat;
  for (const auto& [w, m] : parts) {
    if (w == 0.0) continue;
    for (const auto& c : m.components()) flat.push_back({w * c.weight, c.law});
  }
  if (flat.empty()) throw DomainError("combined mixture has no positive-weight component");
  return Mixture(std::move(flat));
}

double Mixture::density(double y) const {
  double acc = 0.0;
  for (const auto& c : components_) acc += c.weight * c.law.density(y);
  return acc;
}

double Mixture::log_density(double y) const {
  if (components_.size() == 1) return components_.front().law.log_density(y);
  std::vector<double> terms;
  terms.reserve(components_.size());
  for (const auto& c : components_) {
    terms.push_back(c.weight > 0.0 ? std::log(c.weight) + c.law.log_density(y) : kNegInf);
  }
  return log_sum_exp(terms);
}

double Mixture::upper_quantile(double tail) const {
  double u = 0.0;
  for (const auto& c : components_) {
    if (c.weight > 0.0) u = std::max(u, c.law.upper_quantile(tail));
  }
  return u;
}

}  // namespace aht
