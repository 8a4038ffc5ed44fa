#include "fblrate/validation.hpp"

#include "fblrate/mcbounds.hpp"
#include "fblrate/normapprox.hpp"
#include "fblrate/randmat.hpp"

#include <cmath>

namespace fblrate {

double OracleCheck::z_score() const
{
    if (estimate.std_error == 0.0) {
        return estimate.mean == oracle ? 0.0 : INFINITY;
    }
    return (estimate.mean - oracle) / estimate.std_error;
}

OracleCheck variance_law_check(int T, int n_t, int n_r, const SamplingPlan& plan)
{
    const auto acc = accumulate<RunningMoments>(plan, [=](RandomSource& src, RunningMoments& out) {
        out.add(istar_centered_sample(T, n_t, n_r, src));
    });
    return OracleCheck{"variance_law_nt" + std::to_string(n_t) + "_nr" + std::to_string(n_r) + "_T" +
                           std::to_string(T),
                       acc.variance_estimate(), static_cast<double>(T) * T * v_tilde(T, n_t, n_r)};
}

std::vector<OracleCheck> wishart_moment_check(int n_t, int n_r, const SamplingPlan& plan)
{
    const auto acc = accumulate<RunningMoments>(plan, [=](RandomSource& src, RunningMoments& out) {
        out.add(wishart_logdet(n_t, n_r, src));
    });
    const std::string tag = "_nt" + std::to_string(n_t) + "_nr" + std::to_string(n_r);
    return {OracleCheck{"logdet_mean" + tag, acc.mean_estimate(), elogdet_wishart(n_t, n_r)},
            OracleCheck{"logdet_variance" + tag, acc.variance_estimate(), varlogdet_wishart(n_t, n_r)}};
}

PositivityReport positivity_grid(int T_max, int n_r_max)
{
    PositivityReport report;
    for (int n_r = 1; n_r <= n_r_max; ++n_r) {
        for (int n_t = 1; n_t <= n_r; ++n_t) {
            for (int T = n_t + n_r + 1; T <= T_max; ++T) {
                ++report.points;
                const double db = delta_bar(T, n_t, n_r);
                const double xi = xi_gap_limit(T, n_t, n_r);
                if (!(db > 0.0) || !(xi > 0.0)) {
                    report.failures.push_back({n_t, n_r, T, db, xi});
                }
            }
        }
    }
    return report;
}

} // namespace fblrate
