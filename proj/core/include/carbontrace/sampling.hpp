#pragma once

#include "carbontrace/rng.hpp"
#include "carbontrace/types.hpp"

namespace carbontrace {

// All samplers draw by inverse-CDF with one uniform per draw (the base-load
// sampler may consume a second uniform for its single resample), so a stream
// position maps to the same draw on every run.

/// Weibull quantile: x = lambda * (-ln(1-u))^(1/k).
double weibull_quantile(const WeibullParams& p, double u);

double weibull_sample(const WeibullParams& p, RngStream& rng);

/// Mean of the Weibull distribution, lambda * Gamma(1 + 1/k).
double weibull_mean(const WeibullParams& p);

/// Standard normal quantile (Wichura's AS241, double precision).
double normal_quantile(double u);

/// Regularized lower incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Beta distribution quantile on [0, 1].
double beta_quantile(const BetaParams& p, double u);

double beta_sample(const BetaParams& p, RngStream& rng);

inline double beta_mean(const BetaParams& p) { return p.alpha / (p.alpha + p.beta); }

/// Base-load draw: N(mu, sigma^2) truncated below at zero by one resample
/// followed by a clamp.
double base_load_sample(const NormalParams& p, RngStream& rng);

/// EV station aggregate charging demand, MW. Same transform as
/// weibull_sample with lambda in MW.
double ev_demand_sample(const WeibullParams& p, RngStream& rng);

/// Turbine power curve: zero below cut-in and above cut-out, linear ramp
/// from cut-in to rated speed, rated output on [v_rate, v_out].
double wind_power(double speed, const WindTurbineParams& t);

/// Expected turbine output under Weibull wind speeds (adaptive Simpson on
/// the ramp segment plus the closed-form plateau term).
double expected_wind_power(const WeibullParams& wind, const WindTurbineParams& t);

/// Output-dependent carbon intensity of a conventional unit, tCO2/MWh.
/// Lower segment a_down - b_down*P up to and including the design output,
/// upper segment a_over + b_over*P above it. Throws on P outside
/// [0, p_lim].
double marginal_cei(double p_gi, const MarginalCeiParams& p);

}  // namespace carbontrace
