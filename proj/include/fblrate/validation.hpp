#pragma once

// Monte Carlo checks of closed-form results: the variance of the
// information-density proxy, Wishart log-det moments, and the positivity of
// δ̄ and the high-SNR gap over a grid.

#include "fblrate/moments.hpp"
#include "fblrate/parallel.hpp"

#include <string>
#include <vector>

namespace fblrate {

/// One estimate compared with its closed-form value.
struct OracleCheck {
    std::string name;
    MCEstimate estimate;
    double oracle = 0.0;
    double tolerance_sigmas = 3.0;

    [[nodiscard]] double z_score() const;
    [[nodiscard]] bool pass() const { return std::abs(z_score()) <= tolerance_sigmas; }
};

/// Sample variance of i* − I* against T²·Ṽ(T).
OracleCheck variance_law_check(int T, int n_t, int n_r, const SamplingPlan& plan);

/// Mean and variance of ln det(HHᴴ) against Σ Ψ(n_r − i) and Σ Ψ′(n_r − i).
std::vector<OracleCheck> wishart_moment_check(int n_t, int n_r, const SamplingPlan& plan);

struct PositivityFailure {
    int n_t, n_r, T;
    double delta_bar, xi_limit;
};

struct PositivityReport {
    int points = 0;
    std::vector<PositivityFailure> failures;
};

/// δ̄ > 0 and lim Ξ > 0 for n_t ≤ n_r ≤ n_r_max and n_t + n_r < T ≤ T_max.
PositivityReport positivity_grid(int T_max = 64, int n_r_max = 8);

} // namespace fblrate
