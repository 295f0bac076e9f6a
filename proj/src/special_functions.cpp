#include "fracstokes/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fracstokes/errors.hpp"

namespace fracstokes {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogMax = 709.0;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double term) {
    const double t = sum_ + term;
    if (std::fabs(sum_) >= std::fabs(term)) {
      carry_ += (sum_ - t) + term;
    } else {
      carry_ += (term - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// log|Gamma(x)| with the sign of Gamma(x); reentrant.
double log_abs_gamma(double x, int& sign) {
  int s = 1;
  const double v = ::lgamma_r(x, &s);
  sign = s;
  return v;
}

void validate(const MLArg& arg) {
  if (!(arg.alpha > 0.0 && arg.alpha <= 1.0)) {
    throw DomainError("mittag_leffler: alpha must lie in (0, 1], got " + std::to_string(arg.alpha));
  }
  if (!std::isfinite(arg.beta)) throw DomainError("mittag_leffler: beta must be finite");
  if (!std::isfinite(arg.z)) throw DomainError("mittag_leffler: z must be finite");
}

/// Terms beyond all orders of the algebraic expansion are O(exp(-x^(1/alpha)));
/// require them to sit 1e-12 below the smallest admissible value.
bool asymptotic_admissible(double alpha, double x) {
  if (alpha >= 1.0) return false;
  const double t = std::pow(x, 1.0 / alpha);
  return t >= 30.0 + std::log1p(std::tgamma(1.0 - alpha) * x);
}

}  // namespace

double gamma_fn(double x) {
  if (std::isnan(x)) throw DomainError("gamma_fn: NaN argument");
  if (is_nonpositive_integer(x)) {
    throw PoleError("gamma_fn: pole at nonpositive integer " + std::to_string(x));
  }
  if (!std::isfinite(x)) throw DomainError("gamma_fn: non-finite argument");
  return std::tgamma(x);
}

double reciprocal_gamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  if (x > 170.0) return std::exp(-std::lgamma(x));
  if (x < 0.0) {
    // 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi
    const double g = std::tgamma(1.0 - x);
    if (!std::isfinite(g)) return 0.0;
    return g * std::sin(kPi * x) / kPi;
  }
  return 1.0 / std::tgamma(x);
}

namespace ml_branch {

bool series(double alpha, double beta, double z, double& value, double& max_term, int& terms) {
  CompensatedSum sum;
  max_term = 0.0;
  terms = 0;
  if (z == 0.0) {
    value = reciprocal_gamma(beta);
    max_term = std::fabs(value);
    terms = 1;
    return true;
  }
  const double log_z = std::log(std::fabs(z));
  double prev_log = -std::numeric_limits<double>::infinity();
  bool past_peak = false;
  for (int k = 0; k < ml_defaults::kMaxTerms; ++k) {
    const double g_arg = alpha * k + beta;
    double term;
    double log_mag;
    if (g_arg > 0.0) {
      int sign = 1;
      log_mag = k * log_z - log_abs_gamma(g_arg, sign);
      if (log_mag > kLogMax) {
        value = std::numeric_limits<double>::infinity();
        terms = k + 1;
        return false;
      }
      term = std::exp(log_mag);
      if (z < 0.0 && (k % 2 == 1)) term = -term;
    } else {
      term = std::pow(z, k) * reciprocal_gamma(g_arg);
      log_mag = term == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::fabs(term));
    }
    sum.add(term);
    terms = k + 1;
    max_term = std::max(max_term, std::fabs(term));
    if (g_arg > 1.0 && log_mag < prev_log) past_peak = true;
    if (g_arg > 0.0) prev_log = log_mag;
    if (past_peak && std::fabs(term) <= 1e-17 * std::fabs(sum.value())) {
      value = sum.value();
      return true;
    }
  }
  value = sum.value();
  return false;
}

bool asymptotic(double alpha, double beta, double x, double& value, int& terms) {
  // |1/Gamma(beta - alpha k)| <= Gamma(1 - beta + alpha k)/pi by reflection, so
  // env_k = x^-k Gamma(1 - beta + alpha k)/pi bounds the k-th term. The
  // expansion is usable while the envelope decreases.
  CompensatedSum sum;
  terms = 0;
  const double log_x = std::log(x);
  double prev_env = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 400; ++k) {
    const double term = ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-k * log_x) *
                        reciprocal_gamma(beta - alpha * k);
    const double g = 1.0 - beta + alpha * k;
    double env = std::numeric_limits<double>::infinity();
    if (g > 0.0) {
      int sign = 1;
      env = std::exp(-k * log_x + log_abs_gamma(g, sign)) / kPi;
    }
    terms = k;
    if (env > prev_env) {
      value = sum.value();
      return false;
    }
    sum.add(term);
    prev_env = env;
    if (env <= 1e-13 * std::fabs(sum.value())) {
      value = sum.value();
      return true;
    }
  }
  value = sum.value();
  return false;
}

double integral(double alpha, double x, int* nodes) {
  // Substituting r = x^(-1/alpha) exp(s/alpha) maps the density integral to
  //   sin(alpha pi)/(pi alpha) * int q/(q^2 + 2 q cos(alpha pi) + 1) exp(-e^(s/alpha)) ds,
  // q = e^s / x, analytic in the strip |Im s| < min(alpha pi/2, pi(1-alpha)).
  const double c = std::cos(alpha * kPi);
  const double sin_ap = std::sin(alpha * kPi);
  const double lower = 1.0 / (1.0 + std::tgamma(1.0 - alpha) * x);
  const double s_hi = alpha * std::log(45.0);
  const double s_lo = std::log(1e-15 * x * lower * kPi * alpha / sin_ap);
  const double strip = 0.85 * std::min(0.5 * alpha * kPi, kPi * (1.0 - alpha));
  const double h_target = 2.0 * kPi * strip / 37.0;
  const int n = static_cast<int>(std::ceil((s_hi - s_lo) / h_target));
  const double h = (s_hi - s_lo) / n;
  CompensatedSum sum;
  for (int i = 0; i <= n; ++i) {
    const double s = s_lo + i * h;
    const double q = std::exp(s) / x;
    const double damp = std::exp(-std::exp(s / alpha));
    double f = q / (q * q + 2.0 * q * c + 1.0) * damp;
    if (i == 0 || i == n) f *= 0.5;
    sum.add(f);
  }
  if (nodes) *nodes = n + 1;
  return sin_ap / (kPi * alpha) * h * sum.value();
}

}  // namespace ml_branch

MLEvaluation mittag_leffler_detailed(const MLArg& arg) {
  validate(arg);
  const double alpha = arg.alpha;
  const double beta = arg.beta;
  const double z = arg.z;

  if (z == 0.0) return {reciprocal_gamma(beta), MLBranch::Exact, 1};
  if (alpha == 1.0 && beta == 1.0) return {std::exp(z), MLBranch::Exact, 0};

  double value = 0.0;
  double max_term = 0.0;
  int terms = 0;

  if (z > 0.0) {
    if (ml_branch::series(alpha, beta, z, value, max_term, terms) && std::isfinite(value)) {
      return {value, MLBranch::Series, terms};
    }
    throw ConvergenceError("mittag_leffler: series for E_{" + std::to_string(alpha) + "," +
                           std::to_string(beta) + "}(" + std::to_string(z) +
                           ") did not converge or overflows");
  }

  const double x = -z;
  if (x <= ml_defaults::kSwitchRadius) {
    const bool ok = ml_branch::series(alpha, beta, z, value, max_term, terms);
    if (ok && max_term <= 1e3 * std::fabs(value)) return {value, MLBranch::Series, terms};
  }
  if (beta == 1.0 && alpha < 1.0) {
    if (x > ml_defaults::kSwitchRadius && asymptotic_admissible(alpha, x)) {
      double asym = 0.0;
      int asym_terms = 0;
      if (ml_branch::asymptotic(alpha, beta, x, asym, asym_terms)) {
        return {asym, MLBranch::Asymptotic, asym_terms};
      }
    }
    int nodes = 0;
    const double q = ml_branch::integral(alpha, x, &nodes);
    return {q, MLBranch::Integral, nodes};
  }
  // beta != 1: the algebraic expansion for large x, the series otherwise.
  if (x > ml_defaults::kSwitchRadius) {
    double asym = 0.0;
    int asym_terms = 0;
    if (ml_branch::asymptotic(alpha, beta, x, asym, asym_terms)) {
      return {asym, MLBranch::Asymptotic, asym_terms};
    }
  }
  const bool ok = ml_branch::series(alpha, beta, z, value, max_term, terms);
  if (ok && max_term <= 1e6 * std::fabs(value)) return {value, MLBranch::Series, terms};
  throw ConvergenceError("mittag_leffler: no branch converged for E_{" + std::to_string(alpha) +
                         "," + std::to_string(beta) + "}(" + std::to_string(z) + ")");
}

double mittag_leffler(const MLArg& arg) { return mittag_leffler_detailed(arg).value; }

double mittag_leffler(double alpha, double beta, double z) {
  return mittag_leffler(MLArg{alpha, beta, z});
}

BoundPair simon_bounds(double alpha, double x) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("simon_bounds: alpha must lie strictly inside (0, 1)");
  }
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("simon_bounds: x must be >= 0");
  return {1.0 / (1.0 + std::tgamma(1.0 - alpha) * x), 1.0 / (1.0 + x / std::tgamma(1.0 + alpha))};
}

}  // namespace fracstokes
