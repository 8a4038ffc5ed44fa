#pragma once

#include <compare>

// Special functions used by the rate and dispersion formulas.
//
// Every function here is pure and reentrant. Arguments outside the stated
// domain raise fblrate::DomainError instead of returning NaN.

namespace fblrate {

/// A probability in [0, 1]. Construction from a value outside that range throws DomainError.
class Probability {
public:
    constexpr Probability() = default;
    explicit Probability(double value);

    [[nodiscard]] constexpr double value() const noexcept { return value_; }
    [[nodiscard]] constexpr double complement() const noexcept { return 1.0 - value_; }

    friend constexpr bool operator==(Probability, Probability) = default;
    friend constexpr auto operator<=>(Probability a, Probability b) { return a.value_ <=> b.value_; }

private:
    double value_ = 0.0;
};

/// ln Γ(x) for x > 0.
double log_gamma(double x);

/// Ψ(x) = d/dx ln Γ(x), x > 0.
double digamma(double x);

/// Ψ'(x), x > 0.
double trigamma(double x);

/// ln Γ_m(x) = m(m-1)/2 ln π + Σ_{k=1..m} ln Γ(x - k + 1), the complex multivariate
/// log-Gamma. Requires m >= 1 and x > m - 1.
double log_multivariate_gamma(int m, double x);

/// Gaussian tail Q(x) = P[N(0,1) > x].
Probability q_function(double x);

/// Inverse of q_function on (0, 1).
double q_inverse(double p);
inline double q_inverse(Probability p) { return q_inverse(p.value()); }

} // namespace fblrate
