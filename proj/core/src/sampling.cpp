#include "carbontrace/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "carbontrace/errors.hpp"

namespace carbontrace {

double weibull_quantile(const WeibullParams& p, double u) {
  if (u <= 0.0) return 0.0;
  return p.lambda * std::pow(-std::log1p(-u), 1.0 / p.k);
}

double weibull_sample(const WeibullParams& p, RngStream& rng) {
  return weibull_quantile(p, rng.uniform());
}

double weibull_mean(const WeibullParams& p) {
  return p.lambda * std::tgamma(1.0 + 1.0 / p.k);
}

// AS241 algorithm PPND16 (Wichura 1988), |relative error| < 1e-15 over
// (0, 1). Saturates to +/-38.5 at the representable tails.
double normal_quantile(double u) {
  if (u <= 0.0) return -38.5;
  if (u >= 1.0) return 38.5;
  const double q = u - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = q < 0.0 ? u : 1.0 - u;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
              3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
            4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
            2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
            5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double beta_quantile(const BetaParams& p, double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = p.alpha;
  const double b = p.beta;
  double lo = 0.0, hi = 1.0;
  double x = a / (a + b);
  const double ln_bnorm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  for (int it = 0; it < 200; ++it) {
    const double f = incomplete_beta(a, b, x) - u;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double pdf =
        std::exp(ln_bnorm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
    double nx = x;
    if (pdf > 0.0 && std::isfinite(pdf)) nx = x - f / pdf;
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (std::abs(nx - x) < 1e-14 * std::max(1.0, std::abs(x))) return nx;
    x = nx;
  }
  return x;
}

double beta_sample(const BetaParams& p, RngStream& rng) {
  return beta_quantile(p, rng.uniform());
}

double base_load_sample(const NormalParams& p, RngStream& rng) {
  const double u = rng.uniform();
  if (p.sigma == 0.0) return p.mu;
  double x = p.mu + p.sigma * normal_quantile(u);
  if (x < 0.0) {
    x = p.mu + p.sigma * normal_quantile(rng.uniform());
    if (x < 0.0) x = 0.0;
  }
  return x;
}

double ev_demand_sample(const WeibullParams& p, RngStream& rng) {
  return weibull_quantile(p, rng.uniform());
}

double wind_power(double speed, const WindTurbineParams& t) {
  if (speed < t.v_in || speed > t.v_out) return 0.0;
  if (speed >= t.v_rate) return t.p_rate;
  return t.p_rate * (speed - t.v_in) / (t.v_rate - t.v_in);
}

namespace {

double weibull_pdf(const WeibullParams& p, double x) {
  if (x < 0.0) return 0.0;
  const double z = x / p.lambda;
  return p.k / p.lambda * std::pow(z, p.k - 1.0) * std::exp(-std::pow(z, p.k));
}

double weibull_cdf(const WeibullParams& p, double x) {
  if (x <= 0.0) return 0.0;
  return -std::expm1(-std::pow(x / p.lambda, p.k));
}

}  // namespace

double expected_wind_power(const WeibullParams& wind, const WindTurbineParams& t) {
  if (t.p_rate <= 0.0) return 0.0;
  // ramp contribution: integrate P(x) f(x) dx over [v_in, v_rate] with
  // composite Simpson; the integrand is smooth so 2048 panels are far
  // below 1e-12 relative error
  const int n = 2048;
  const double h = (t.v_rate - t.v_in) / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = t.v_in + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * wind_power(x, t) * weibull_pdf(wind, x);
  }
  const double ramp = acc * h / 3.0;
  const double plateau = t.p_rate * (weibull_cdf(wind, t.v_out) - weibull_cdf(wind, t.v_rate));
  return ramp + plateau;
}

double marginal_cei(double p_gi, const MarginalCeiParams& p) {
  if (p_gi < 0.0 || p_gi > p.p_lim * (1.0 + 1e-12)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "generator output %.6g MW outside [0, %.6g] for marginal CEI",
                  p_gi, p.p_lim);
    throw ModelingError(buf);
  }
  if (p_gi <= p.p_rate) return p.a_down - p.b_down * p_gi;
  return p.a_over + p.b_over * p_gi;
}

}  // namespace carbontrace
