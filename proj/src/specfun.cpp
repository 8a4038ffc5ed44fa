#include "fblrate/specfun.hpp"

#include "fblrate/error.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace fblrate {

namespace {

// Arguments are shifted upward by unit steps until they reach this value;
// the asymptotic series below are accurate to a few ulp from here on.
constexpr double kAsymptoticThreshold = 10.0;

void require_positive(double x, const char* name)
{
    if (!(x > 0.0)) {
        throw DomainError(std::string(name) + ": argument must be > 0, got " + std::to_string(x));
    }
}

// Stirling series for ln Γ(x), x >= 10.
double log_gamma_asymptotic(double x)
{
    constexpr std::array<double, 7> c = {
        1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0,
        1.0 / 1188.0, -691.0 / 360360.0, 1.0 / 156.0,
    };
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        series = series * inv2 + *it;
    }
    constexpr double half_log_two_pi = 0.91893853320467274178032973640562;
    return (x - 0.5) * std::log(x) - x + half_log_two_pi + series * inv;
}

// Ψ(x) - ln x + 1/(2x), x >= 10, in powers of 1/x².
double digamma_tail(double x)
{
    constexpr std::array<double, 7> c = {
        -1.0 / 12.0, 1.0 / 120.0, -1.0 / 252.0, 1.0 / 240.0,
        -1.0 / 132.0, 691.0 / 32760.0, -1.0 / 12.0,
    };
    const double inv2 = 1.0 / (x * x);
    double series = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        series = series * inv2 + *it;
    }
    return series * inv2;
}

// Ψ'(x) - 1/x - 1/(2x²), x >= 10.
double trigamma_tail(double x)
{
    constexpr std::array<double, 7> c = {
        1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
        5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0,
    };
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        series = series * inv2 + *it;
    }
    return series * inv2 * inv;
}

// Lower-tail standard normal quantile, rational approximation with relative
// error about 1e-9 (P. J. Acklam). Refined by Newton steps in q_inverse.
double normal_quantile_initial(double p)
{
    constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                         -2.759285104469687e+02, 1.383577518672690e+02,
                                         -3.066479806614716e+01, 2.506628277459239e+00};
    constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                         -1.556989798598866e+02, 6.680131188771972e+01,
                                         -1.328068155288572e+01};
    constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                         -2.400758277161838e+00, -2.549732539343734e+00,
                                         4.374664141464968e+00, 2.938163982698783e+00};
    constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                         2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace

Probability::Probability(double value) : value_(value)
{
    if (!(value >= 0.0 && value <= 1.0)) {
        throw DomainError("probability must lie in [0, 1], got " + std::to_string(value));
    }
}

double log_gamma(double x)
{
    require_positive(x, "log_gamma");
    double product = 1.0;
    while (x < kAsymptoticThreshold) {
        product *= x;
        x += 1.0;
    }
    return log_gamma_asymptotic(x) - std::log(product);
}

double digamma(double x)
{
    require_positive(x, "digamma");
    double shift = 0.0;
    while (x < kAsymptoticThreshold) {
        shift -= 1.0 / x;
        x += 1.0;
    }
    return shift + std::log(x) - 0.5 / x + digamma_tail(x);
}

double trigamma(double x)
{
    require_positive(x, "trigamma");
    double shift = 0.0;
    while (x < kAsymptoticThreshold) {
        shift += 1.0 / (x * x);
        x += 1.0;
    }
    return shift + 1.0 / x + 0.5 / (x * x) + trigamma_tail(x);
}

double log_multivariate_gamma(int m, double x)
{
    if (m < 1) {
        throw DomainError("log_multivariate_gamma: dimension must be >= 1");
    }
    if (!(x > m - 1)) {
        throw DomainError("log_multivariate_gamma: need x > m - 1, got m=" + std::to_string(m) +
                          ", x=" + std::to_string(x));
    }
    double sum = 0.5 * m * (m - 1) * std::log(std::numbers::pi);
    for (int k = 1; k <= m; ++k) {
        sum += log_gamma(x - k + 1);
    }
    return sum;
}

Probability q_function(double x)
{
    if (std::isnan(x)) {
        throw DomainError("q_function: NaN argument");
    }
    return Probability(0.5 * std::erfc(x / std::numbers::sqrt2));
}

double q_inverse(double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("q_inverse: need 0 < p < 1, got " + std::to_string(p));
    }
    // Q⁻¹(p) = -Φ⁻¹(p)
    double x = -normal_quantile_initial(p);
    constexpr double inv_sqrt_two_pi = 0.39894228040143267793994605993438;
    for (int step = 0; step < 3; ++step) {
        const double density = inv_sqrt_two_pi * std::exp(-0.5 * x * x);
        if (!(density > 0.0)) {
            break;
        }
        // Halley step on f(x) = Q(x) - p, f' = -φ, f'' = xφ.
        const double f = q_function(x).value() - p;
        const double newton = f / density;
        const double next = x + newton / (1.0 - 0.5 * x * newton);
        if (!std::isfinite(next)) {
            break;
        }
        x = next;
    }
    return x;
}

} // namespace fblrate
