#pragma once

namespace fracstokes {

/// Arguments of the two-parameter Mittag-Leffler function E_{alpha,beta}(z).
struct MLArg {
  double alpha;
  double beta = 1.0;
  double z = 0.0;
};

/// Two-sided envelope for E_{alpha,1}(-x) on x >= 0.
struct BoundPair {
  double lower;
  double upper;
};

/// Which evaluation route produced a Mittag-Leffler value.
enum class MLBranch { Exact, Series, Asymptotic, Integral };

struct MLEvaluation {
  double value;
  MLBranch branch;
  int terms;  ///< series/asymptotic terms or quadrature nodes used
};

namespace ml_defaults {
inline constexpr double kSwitchRadius = 5.0;
inline constexpr double kTolerance = 1e-10;
inline constexpr int kMaxTerms = 10000;
}  // namespace ml_defaults

/// Euler gamma function. Throws PoleError at 0, -1, -2, ...
double gamma_fn(double x);

/// 1/Gamma(x), entire; exactly zero at the poles of Gamma.
double reciprocal_gamma(double x);

/// E_{alpha,beta}(z) for 0 < alpha <= 1 and real z.
///
/// Branches: the Taylor series for |z| <= 5 (rejected for negative z when the
/// alternating sum loses more than three digits to cancellation), the
/// algebraic expansion sum_{k>=1} (-1)^{k+1} x^{-k} / Gamma(beta - alpha k)
/// for z = -x far enough out that terms beyond all orders are below 1e-12,
/// and otherwise (beta = 1 only) trapezoidal quadrature of the spectral
/// density integral
///   E_alpha(-t^alpha) = int_0^inf exp(-r t) sin(alpha pi) r^(alpha-1)
///                       / (pi (r^(2 alpha) + 2 r^alpha cos(alpha pi) + 1)) dr.
/// Throws DomainError on invalid arguments and ConvergenceError when no branch
/// reaches the tolerance (including results that overflow a double).
double mittag_leffler(const MLArg& arg);
double mittag_leffler(double alpha, double beta, double z);

/// Same as mittag_leffler but reports the branch that was used.
MLEvaluation mittag_leffler_detailed(const MLArg& arg);

/// Individual branches, exposed for cross-checks between routes.
namespace ml_branch {
/// Returns false when the series does not converge within the term cap.
bool series(double alpha, double beta, double z, double& value, double& max_term, int& terms);
/// Algebraic expansion at z = -x, x > 0. Returns false when the terms stall
/// above tolerance.
bool asymptotic(double alpha, double beta, double x, double& value, int& terms);
/// Spectral-density quadrature for E_{alpha,1}(-x), 0 < alpha < 1, x > 0.
double integral(double alpha, double x, int* nodes = nullptr);
}  // namespace ml_branch

/// (1/(1 + Gamma(1-alpha) x), 1/(1 + x/Gamma(1+alpha))) for alpha in (0,1), x >= 0.
BoundPair simon_bounds(double alpha, double x);

}  // namespace fracstokes
