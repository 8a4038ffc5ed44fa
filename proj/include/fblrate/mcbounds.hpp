#pragma once

// Converse-side quantities for the noncoherent channel: output densities,
// the mismatched information density, the stochastic upper bound j̄ with
// its moments, the δ̄ / Ξ gap, and an empirical evaluation of the weakened
// meta-converse bound.

#include "fblrate/moments.hpp"
#include "fblrate/normapprox.hpp"
#include "fblrate/parallel.hpp"
#include "fblrate/randmat.hpp"

#include <vector>

namespace fblrate {

/// Diagonal per-antenna amplitudes d_1..d_{n_t} of a block input.
struct PowerAllocation {
    std::vector<double> diag;

    [[nodiscard]] int n_t() const noexcept { return static_cast<int>(diag.size()); }
    [[nodiscard]] double trace() const noexcept;
    /// α = tr(D²)/T.
    [[nodiscard]] double alpha(int T) const noexcept { return trace() / T; }

    /// d_i² = Tρ/n_t for every antenna.
    static PowerAllocation equal_power(int n_t, int T, double rho);
    /// Throws DomainError unless d_i ≥ 0 and Σd_i² ≤ Tρ.
    void require_feasible(int T, double rho) const;
};

/// ln f(Y|X) = −tr(Yᴴ(I + XXᴴ)⁻¹Y) − n_r T ln π − n_r ln det(I + XᴴX).
/// X (T×n_t) carries the transmit power.
double conditional_log_pdf(const ComplexMatrix& y, const ComplexMatrix& x);

/// The same density for a USTM-type input X = sqrt(Tρ/n_t)·U, written with
/// the unit-column matrix U (UᴴU = I).
double conditional_log_pdf_unit(const ComplexMatrix& y, const ComplexMatrix& u, double rho);

/// ln q_Y(Y) of the auxiliary output density, μ = Tρ/n_t.
double aux_log_pdf(const ComplexMatrix& y, double rho, int n_t);

/// conditional_log_pdf − aux_log_pdf.
double mismatched_info_density(const ComplexMatrix& x, const ComplexMatrix& y, double rho, int n_t);

/// One draw of j̄(D, T, ρ).
double sample_jbar(const PowerAllocation& d, int T, double rho, int n_r, RandomSource& source);
double sample_jbar(const PowerAllocation& d, int T, double rho, int n_r, RngStream stream);

/// J̄(D, T, ρ): closed-form terms plus a Monte Carlo estimate of the log-det expectation.
MCEstimate jbar_mean(const PowerAllocation& d, int T, double rho, int n_r, const SamplingPlan& plan);

/// Ū(D, T, ρ) = Var j̄, estimated from j̄ draws. std_error is that of the sample variance.
MCEstimate ubar_var(const PowerAllocation& d, int T, double rho, int n_r, const SamplingPlan& plan);

double delta_bar(int T, int n_t, int n_r);
double jbar_D1(int T, double rho, int n_t, int n_r);
double jbar_D2(int T, double rho, int n_t, int n_r);
/// Ξ(T, ρ) = J̄_D1 − J̄_D2, evaluated in its own closed form.
double xi_gap(int T, double rho, int n_t, int n_r);
/// lim_{ρ→∞} Ξ(T, ρ).
double xi_gap_limit(int T, int n_t, int n_r);

struct IstarParts {
    double wishart;   // (T − n_t)(ln det(HHᴴ) − E ln det(HHᴴ))
    double noise;     // G − n_t(T − n_t), G ~ Γ(n_t(T − n_t), 1)
    [[nodiscard]] double value() const noexcept { return wishart - noise; }
};

IstarParts istar_parts(int T, int n_t, int n_r, RandomSource& source);
/// One zero-mean draw of the high-SNR information-density proxy i* − I*.
double istar_centered_sample(int T, int n_t, int n_r, RandomSource& source);
double istar_centered_sample(int T, int n_t, int n_r, RngStream stream);

struct EmpiricalConverseResult {
    double rate_upper_bound = 0.0; // nats per channel use
    double std_error = 0.0;        // bootstrap standard error of the rate
    double threshold_log_xi = 0.0;
    Probability tail_estimate{};
    std::int64_t samples = 0;      // realizations of the L-block sum
    std::int64_t block_draws = 0;  // j̄ draws, samples·L
    bool empirical = true;
};

/// Empirical weakened meta-converse at equal power, minimized over sample
/// thresholds. plan.samples counts j̄ draws; L must be an integer and
/// plan.samples ≥ 10·L. Any ε in (0, 1) is accepted. Throws InfeasibleError when no threshold has
/// tail estimate below 1 − ε.
EmpiricalConverseResult empirical_converse(const Scenario& s, const SamplingPlan& plan);

} // namespace fblrate
