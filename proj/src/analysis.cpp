// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "aht/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "aht/error.hpp"

namespace aht {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxAbsError = 1e-8;
constexpr double kQuadTail = 1e-14;
constexpr double kSumTail = 1e-14;

// p(y) (log p(y) - log q(y)), with 0 log 0 = 0. Sets `violation` where p has
// mass and q has none.
double kl_integrand(const Mixture& p, const Mixture& q, double y, bool& violation) {
  const double lp = p.log_density(y);
  if (lp == -kInf) return 0.0;
  const double lq = q.log_density(y);
  if (lq == -kInf) {
    violation = true;
    return 0.0;
  }
  return std::exp(lp) * (lp - lq);
}

double tail_mass(const Mixture& m, double y) {
  double t = 0.0;
  for (const auto& c : m.components()) t += c.weight * (1.0 - c.law.cdf(y));
  return std::max(0.0, t);
}

std::vector<double> breakpoints(const Mixture& p, const Mixture& q, double upper) {
  std::vector<double> pts{0.0, upper};
  for (const Mixture* m : {&p, &q}) {
    for (const auto& c : m->components()) {
      const double scale = 1.0 / c.law.parameter();
      for (int j = -3; j <= 6; ++j) {
        const double x = std::ldexp(scale, j);
        if (x > 0.0 && x < upper) pts.push_back(x);
      }
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

struct Piece {
  double value;
  double error;
};

// Adaptive bisection on a 30-point Gauss rule, with the gap to a 20-point
// rule as the local error estimate.
template <typename F>
Piece integrate_adaptive(const F& f, double a, double b, double tol, int depth) {
  using Fine = boost::math::quadrature::gauss<double, 30>;
  using Coarse = boost::math::quadrature::gauss<double, 20>;
  const double fine = Fine::integrate(f, a, b);
  const double err = std::abs(fine - Coarse::integrate(f, a, b));
  if (err <= tol || depth == 0) return {fine, err};
  const double mid = 0.5 * (a + b);
  const Piece left = integrate_adaptive(f, a, mid, 0.5 * tol, depth - 1);
  const Piece right = integrate_adaptive(f, mid, b, 0.5 * tol, depth - 1);
  return {left.value + right.value, left.error + right.error};
}

KlResult kl_continuous(const Mixture& p, const Mixture& q) {
  const double upper = std::max(p.upper_quantile(kQuadTail), q.upper_quantile(kQuadTail));
  const auto pts = breakpoints(p, q, upper);
  bool violation = false;
  auto integrand = [&](double y) { return kl_integrand(p, q, y, violation); };
  KlResult out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Piece piece = integrate_adaptive(integrand, pts[i], pts[i + 1], 1e-12, 24);
    out.value += piece.value;
    out.abs_error += piece.error;
  }
  if (violation) return {kInf, 0.0, true};
  // Mass beyond the cut contributes at most tail * |log ratio| there.
  const double tail = tail_mass(p, upper);
  const double lp = p.log_density(upper);
  const double lq = q.log_density(upper);
  if (tail > 0.0 && lp != -kInf && lq != -kInf) out.abs_error += tail * (1.0 + std::abs(lp - lq));
  return out;
}

double support_end(const Mixture& m) {
  double end = 0.0;
  for (const auto& c : m.components()) {
    if (c.law.kind() != DistributionKind::Tabulated) return kInf;
    end = std::max(end, static_cast<double>(c.law.probabilities().size() - 1));
  }
  return end;
}

KlResult kl_discrete(const Mixture& p, const Mixture& q) {
  // Sum until both laws have less than kSumTail mass left, or to the end of
  // a finite support.
  const double upper = std::min(std::max(p.upper_quantile(kSumTail), q.upper_quantile(kSumTail)),
                                std::max(support_end(p), support_end(q)));
  bool violation = false;
  KlResult out;
  double compensation = 0.0;
  for (double k = 0.0; k <= upper; k += 1.0) {
    // Kahan summation; terms can span many orders of magnitude.
    const double term = kl_integrand(p, q, k, violation) - compensation;
    const double next = out.value + term;
    compensation = (next - out.value) - term;
    out.value = next;
  }
  if (violation) return {kInf, 0.0, true};
  const double tail = tail_mass(p, upper);
  if (tail > 0.0) {
    const double lp = p.log_density(upper + 1.0);
    const double lq = q.log_density(upper + 1.0);
    const double lr = (lp == -kInf || lq == -kInf) ? 0.0 : std::abs(lp - lq);
    out.abs_error = tail * (1.0 + lr) * 10.0;
  }
  return out;
}

}  // namespace

std::optional<double> kl_closed_form(const DistributionSpec& p, const DistributionSpec& q) {
  if (p.kind() != q.kind()) return std::nullopt;
  const double a = p.parameter();
  const double b = q.parameter();
  switch (p.kind()) {
    case DistributionKind::Exponential:
      return std::log(a / b) + b / a - 1.0;
    case DistributionKind::Geometric:
      // E_p[k] = (1-a)/a under the pmf theta (1-theta)^k.
      return std::log(a / b) + (1.0 - a) / a * (std::log1p(-a) - std::log1p(-b));
    case DistributionKind::Tabulated:
      return std::nullopt;
  }
  return std::nullopt;
}

KlResult kl_numeric(const Mixture& p, const Mixture& q) {
  if (p.space() != q.space()) throw DomainError("KL divergence between laws on different sample spaces");
  KlResult r = p.space() == SampleSpace::Continuous ? kl_continuous(p, q) : kl_discrete(p, q);
  if (!r.support_violation && !(r.abs_error <= kMaxAbsError)) {
    throw NumericError(fmt::format("KL evaluation did not converge: value {:.12g}, error estimate {:.3g} > {:.0e}",
                                   r.value, r.abs_error, kMaxAbsError));
  }
  return r;
}

KlResult kl_divergence(const Mixture& p, const Mixture& q) {
  if (p.is_single() && q.is_single()) {
    if (p.single() == q.single()) return {0.0, 0.0, false};
    if (const auto v = kl_closed_form(p.single(), q.single())) return {*v, 0.0, false};
  }
  return kl_numeric(p, q);
}

double rate_I_d(const DistributionSpec& f, const DistributionSpec& g, double level, std::size_t cells,
                std::size_t probes) {
  if (cells < 2) throw DomainError(fmt::format("rate needs at least 2 cells, got {}", cells));
  if (probes < 1 || probes > cells) {
    throw DomainError(fmt::format("probes per step must lie in [1, {}], got {}", cells, probes));
  }
  const Mixture mixed = Mixture::two_point(level, f, g);
  const Mixture normal(f);
  const double forward = kl_divergence(mixed, normal).value;
  if (probes == 1) return forward;
  const double weight = static_cast<double>(probes - 1) / static_cast<double>(cells - 1);
  return forward + weight * kl_divergence(normal, mixed).value;
}

double RateReport::predicted_delay(double cost) const { return -std::log(cost) / I_star; }

double RateReport::predicted_risk(double cost) const { return -cost * std::log(cost) / I_star; }

RateReport rate_I_star(const DistributionSpec& f, const DistributionSpec& g, const OraclePalette& palette,
                       std::size_t cells, std::size_t probes) {
  palette.validate();
  RateReport out;
  out.I_d.reserve(palette.size());
  for (std::size_t d = 0; d < palette.size(); ++d) {
    out.I_d.push_back(rate_I_d(f, g, palette.levels[d], cells, probes));
    out.I_star += palette.weights[d] * out.I_d.back();
  }
  return out;
}

MixtureKlReport verify_mixture_kl_inequality(const DistributionSpec& f,
                                             std::span<const std::pair<double, Mixture>> components) {
  if (components.empty()) throw DomainError("mixture inequality needs at least one component");
  double total = 0.0;
  for (const auto& [w, m] : components) {
    if (!(w >= 0.0)) throw DomainError(fmt::format("component weight must be >= 0, got {}", w));
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError(fmt::format("component weights must sum to 1, got {:.17g}", total));
  }
  const Mixture normal(f);
  const Mixture gbar = Mixture::combine(components);
  MixtureKlReport out;
  for (const auto& [w, m] : components) {
    if (w == 0.0) continue;
    const KlResult to_f = kl_divergence(m, normal);
    const KlResult to_bar = kl_divergence(m, gbar);
    out.lhs += w * to_f.value;
    out.posterior_term += w * to_bar.value;
    out.abs_error += w * (to_f.abs_error + to_bar.abs_error);
  }
  const KlResult rhs = kl_divergence(gbar, normal);
  out.rhs = rhs.value;
  out.abs_error += rhs.abs_error;
  out.slack = out.lhs - out.rhs;
  return out;
}

Theorem2Report theorem2_gap(const DistributionSpec& f, const DistributionSpec& g, const OraclePalette& palette,
                            std::size_t cells, std::size_t probes) {
  Theorem2Report out;
  out.I_adhm = rate_I_star(f, g, palette, cells, probes).I_star;
  // sum_d w_d (P_d f + (1-P_d) g) is the two-point mixture at the mean level.
  out.I_chernoff = rate_I_d(f, g, std::clamp(palette.mean_level(), 0.0, 1.0), cells, probes);
  out.gap = out.I_adhm - out.I_chernoff;
  return out;
}

}  // namespace aht
