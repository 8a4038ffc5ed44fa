#include "doctest.h"

#include "fblrate/error.hpp"
#include "fblrate/mcbounds.hpp"
#include "fblrate/specfun.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace fblrate;

namespace {

ComplexMatrix random_unitary(int size, RandomSource& source)
{
    Eigen::HouseholderQR<ComplexMatrix> qr(sample_cn_matrix(size, size, source));
    return qr.householderQ() * ComplexMatrix::Identity(size, size);
}

ComplexMatrix unit_vector(int rows, int index)
{
    ComplexMatrix e = ComplexMatrix::Zero(rows, 1);
    e(index, 0) = 1.0;
    return e;
}

const double kLogPi = std::log(std::numbers::pi);

} // namespace

TEST_CASE("conditional density worked example")
{
    const double mu = 4.0;
    const ComplexMatrix x = std::sqrt(mu) * unit_vector(2, 0);
    const ComplexMatrix y = unit_vector(2, 0);
    const double expected = -1.0 / (1.0 + mu) - 2.0 * kLogPi - std::log1p(mu);
    CHECK(conditional_log_pdf(y, x) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(conditional_log_pdf(y, x) == doctest::Approx(-4.098897684132901).epsilon(1e-13));
    CHECK(conditional_log_pdf_unit(y, unit_vector(2, 0), 2.0) == doctest::Approx(expected).epsilon(1e-13));

    const ComplexMatrix yy = sample_cn_matrix(5, 2, RngStream{1, 1});
    CHECK(conditional_log_pdf(yy, ComplexMatrix::Zero(5, 2)) ==
          doctest::Approx(-yy.squaredNorm() - 10.0 * kLogPi).epsilon(1e-13));
    CHECK_THROWS_AS(conditional_log_pdf(yy, ComplexMatrix::Zero(4, 2)), DimensionError);
}

TEST_CASE("the two conditional-density conventions agree for USTM inputs")
{
    RandomSource source(RngStream{4, 0});
    for (int trial = 0; trial < 50; ++trial) {
        const int T = 6, n_t = 2, n_r = 3;
        const double rho = 0.5 + trial;
        const ComplexMatrix u = random_unitary(T, source).leftCols(n_t);
        const ComplexMatrix x = std::sqrt(rho * T / n_t) * u;
        const ComplexMatrix y = channel_output(x, n_r, source);
        CHECK(conditional_log_pdf(y, x) == doctest::Approx(conditional_log_pdf_unit(y, u, rho)).epsilon(1e-10));
    }
}

TEST_CASE("auxiliary density worked example")
{
    const ComplexMatrix y = unit_vector(2, 0);
    const double expected = -std::log(4.0) - 2.0 * kLogPi - 0.25;
    CHECK(aux_log_pdf(y, 2.0, 1) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(aux_log_pdf(y, 2.0, 1) == doctest::Approx(-3.925754132818691).epsilon(1e-13));

    // For n_t = n_r = 1, T = 2 the density depends on Y only through σ₁.
    ComplexMatrix other(2, 1);
    other << std::complex<double>(0.6, 0.0), std::complex<double>(0.0, 0.8);
    CHECK(aux_log_pdf(other, 2.0, 1) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("mismatched information density worked example")
{
    const ComplexMatrix x = 2.0 * unit_vector(2, 0);
    const ComplexMatrix y = unit_vector(2, 0);
    CHECK(mismatched_info_density(x, y, 2.0, 1) == doctest::Approx(0.05 - std::log(1.25)).epsilon(1e-12));
    CHECK(mismatched_info_density(x, y, 2.0, 1) == doctest::Approx(-0.17314355131420976).epsilon(1e-12));
}

TEST_CASE("unitary invariance of both densities")
{
    RandomSource source(RngStream{8, 0});
    for (int trial = 0; trial < 100; ++trial) {
        const int T = 7, n_t = 2, n_r = 3;
        const double rho = 10.0;
        const ComplexMatrix x = sample_cn_matrix(T, n_t, source) * 0.8;
        const ComplexMatrix y = channel_output(x, n_r, source);
        const ComplexMatrix a = random_unitary(T, source);
        const double f = conditional_log_pdf(y, x);
        CHECK(conditional_log_pdf(a * y, a * x) == doctest::Approx(f).epsilon(1e-9));
        const double q = aux_log_pdf(y, rho, n_t);
        CHECK(aux_log_pdf(a * y, rho, n_t) == doctest::Approx(q).epsilon(1e-9));
    }
}

TEST_CASE("mismatched density is additive over blocks")
{
    RandomSource source(RngStream{12, 0});
    const int T = 5, n_t = 1, n_r = 2, blocks = 4;
    const double rho = 20.0;
    const auto d = PowerAllocation::equal_power(n_t, T, rho);
    ComplexMatrix x = ComplexMatrix::Zero(T, n_t);
    x(0, 0) = d.diag[0];
    double sum = 0.0;
    ComplexMatrix y_all(T * blocks, n_r);
    for (int l = 0; l < blocks; ++l) {
        const ComplexMatrix y = channel_output(x, n_r, source);
        y_all.middleRows(l * T, T) = y;
        sum += mismatched_info_density(x, y, rho, n_t);
    }
    // Product densities: log-likelihood ratios of independent blocks add.
    double cond = 0.0, aux = 0.0;
    for (int l = 0; l < blocks; ++l) {
        const ComplexMatrix y = y_all.middleRows(l * T, T);
        cond += conditional_log_pdf(y, x);
        aux += aux_log_pdf(y, rho, n_t);
    }
    CHECK(sum == doctest::Approx(cond - aux).epsilon(1e-12));
}

TEST_CASE("degenerate spectra")
{
    ComplexMatrix y = ComplexMatrix::Zero(4, 2);
    y(0, 0) = 1.0;
    y(1, 1) = 1.0;
    // σ₁ = σ₂: separated by the tie perturbation.
    CHECK(std::isfinite(aux_log_pdf(y, 5.0, 1)));
    CHECK_THROWS_AS(aux_log_pdf(ComplexMatrix::Zero(4, 2), 5.0, 1), DegenerateSpectrumError);
    CHECK_THROWS_AS(aux_log_pdf(y, 5.0, 3), DimensionError);
}

TEST_CASE("power allocation")
{
    const auto d = PowerAllocation::equal_power(2, 8, 10.0);
    CHECK(d.trace() == doctest::Approx(80.0));
    CHECK(d.alpha(8) == doctest::Approx(10.0));
    CHECK_NOTHROW(d.require_feasible(8, 10.0));
    CHECK_THROWS_AS(d.require_feasible(8, 9.0), DomainError);
    CHECK_THROWS_AS((PowerAllocation{{-1.0}}.require_feasible(8, 9.0)), DomainError);
}

TEST_CASE("delta_bar and the Xi gap")
{
    CHECK(delta_bar(2, 1, 1) == doctest::Approx(1.4754658853490094).epsilon(1e-12));
    for (int n_r = 1; n_r <= 8; ++n_r) {
        for (int n_t = 1; n_t <= n_r; ++n_t) {
            CHECK(xi_gap_limit(n_t + n_r, n_t, n_r) == 0.0);
            for (int T = n_t + n_r + 1; T <= 64; ++T) {
                const double db = delta_bar(T, n_t, n_r);
                CHECK(db > 0.0);
                CHECK(db < static_cast<double>(T) / n_t);
                CHECK(xi_gap_limit(T, n_t, n_r) > 0.0);
                CHECK(std::abs(xi_gap(T, 1e6, n_t, n_r) - xi_gap_limit(T, n_t, n_r)) <= 1e-3);
            }
        }
    }
}

TEST_CASE("J̄_D1 − J̄_D2 equals Ξ exactly")
{
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 200; ++trial) {
        const int n_t = 1 + static_cast<int>(gen() % 6);
        const int n_r = n_t + static_cast<int>(gen() % 3);
        const int T = n_t + n_r + static_cast<int>(gen() % 50);
        const double rho = std::pow(10.0, std::uniform_real_distribution<double>(-1.0, 5.0)(gen));
        CHECK(std::abs(jbar_D1(T, rho, n_t, n_r) - jbar_D2(T, rho, n_t, n_r) - xi_gap(T, rho, n_t, n_r)) <= 1e-12);
    }
}

TEST_CASE("J̄_D1 and J̄_D2 structure")
{
    // Leading growth in ρ: n_t n_r + n_t(T − n_t − n_r) per unit ln ρ.
    const int T = 10, n_t = 2, n_r = 3;
    const double slope = (jbar_D1(T, 1e9, n_t, n_r) - jbar_D1(T, 1e8, n_t, n_r)) / std::log(10.0);
    CHECK(slope == doctest::Approx(n_t * n_r + n_t * (T - n_t - n_r)).epsilon(1e-6));

    // n_t = 1: the power block of J̄_D2 is ln(1 + δ̄ρ) alone.
    const double rho = 50.0;
    const double expected = 3.0 * std::log(T * rho) + (log_gamma(1.0) - log_gamma(T)) - (T - 1) +
                            (T - 1) * digamma(3.0) + (T - 1 - 3) * std::log1p(delta_bar(T, 1, 3) * rho);
    CHECK(jbar_D2(T, rho, 1, 3) == doctest::Approx(expected).epsilon(1e-12));
    CHECK_THROWS_AS(jbar_D1(4, rho, 2, 3), ValidityError);
}

TEST_CASE("j̄ sampling")
{
    const int T = 6, n_t = 1, n_r = 2;
    const double rho = 100.0;
    const auto full = PowerAllocation::equal_power(n_t, T, rho);
    CHECK(full.alpha(T) == doctest::Approx(rho));
    CHECK(sample_jbar(full, T, rho, n_r, RngStream{1, 2}) == sample_jbar(full, T, rho, n_r, RngStream{1, 2}));

    SamplingPlan plan{200'000, RngStream{66, 0}};
    for (const auto& d : {full, PowerAllocation{{3.0}}, PowerAllocation{{0.0}}}) {
        const auto direct = accumulate<RunningMoments>(plan, [&](RandomSource& src, RunningMoments& acc) {
            acc.add(sample_jbar(d, T, rho, n_r, src));
        });
        SamplingPlan other = plan;
        other.stream.seed = 67;
        const auto closed = jbar_mean(d, T, rho, n_r, other);
        const auto de = direct.mean_estimate();
        CHECK(std::abs(de.mean - closed.mean) <
              3.0 * std::sqrt(de.std_error * de.std_error + closed.std_error * closed.std_error));
    }
    CHECK_THROWS_AS(sample_jbar(full, 1, rho, n_r, RngStream{}), DimensionError);
}

TEST_CASE("J̄ at full power approaches J̄_D1 as ρ grows")
{
    const int T = 6, n_t = 1, n_r = 2;
    SamplingPlan plan{100'000, RngStream{91, 0}};
    double previous_gap = INFINITY;
    for (double rho : {1e2, 1e4}) {
        const auto d = PowerAllocation::equal_power(n_t, T, rho);
        const auto m = jbar_mean(d, T, rho, n_r, plan);
        const double gap = m.mean - jbar_D1(T, rho, n_t, n_r);
        CHECK(gap < previous_gap);
        previous_gap = gap;
        if (rho == 1e4) {
            CHECK(std::abs(gap) < 3.0 * m.std_error + 5e-3);
        }
    }
}

TEST_CASE("Ū moments")
{
    const int T = 8, n_t = 2, n_r = 2;
    const double rho = 1e4;
    SamplingPlan plan{200'000, RngStream{5, 5}};
    const auto full = ubar_var(PowerAllocation::equal_power(n_t, T, rho), T, rho, n_r, plan);
    CHECK(full.mean >= 0.0);
    CHECK(full.mean >= (T - n_t) * n_t - 3.0 * full.std_error);
    const double target = T * T * v_tilde(T, n_t, n_r);
    CHECK(std::abs(full.mean - target) < 3.0 * full.std_error + 0.02 * target);
}

TEST_CASE("variance law for i* − I*")
{
    struct Case {
        int n_t, n_r, T;
    };
    for (auto c : {Case{1, 2, 4}, Case{2, 2, 8}, Case{2, 4, 12}}) {
        SamplingPlan plan{200'000, RngStream{123, static_cast<std::uint64_t>(c.T)}};
        const auto cov = accumulate<RunningCovariance>(plan, [c](RandomSource& src, RunningCovariance& acc) {
            const auto p = istar_parts(c.T, c.n_t, c.n_r, src);
            acc.add(p.wishart, p.noise);
        });
        CHECK(std::abs(cov.covariance()) < 3.0 * cov.covariance_std_error());

        const auto m = accumulate<RunningMoments>(plan, [c](RandomSource& src, RunningMoments& acc) {
            acc.add(istar_centered_sample(c.T, c.n_t, c.n_r, src));
        });
        const auto mean = m.mean_estimate();
        const auto var = m.variance_estimate();
        CHECK(std::abs(mean.mean) < 3.0 * mean.std_error);
        const double target = c.T * c.T * v_tilde(c.T, c.n_t, c.n_r);
        CHECK(std::abs(var.mean - target) < 3.0 * var.std_error);
    }
}

TEST_CASE("empirical converse")
{
    const Scenario s{1, 2, 24, 7, std::pow(10.0, 2.5), Probability(1e-5)};
    SamplingPlan plan{20'000, RngStream{31, 0}};
    const auto r = empirical_converse(s, plan);
    CHECK(r.empirical);
    CHECK(r.samples == 20'000 / 7);
    CHECK(r.block_draws == r.samples * 7);
    CHECK(r.tail_estimate.value() < 1.0 - 1e-5);
    CHECK(r.std_error > 0.0);
    CHECK(r.rate_upper_bound == empirical_converse(s, plan).rate_upper_bound);

    Scenario hopeless = s;
    hopeless.eps = Probability(0.999);
    CHECK_THROWS_AS(empirical_converse(hopeless, SamplingPlan{70, RngStream{31, 0}}), InfeasibleError);

    Scenario fractional = s;
    fractional.L = 6.5;
    CHECK_THROWS_AS(empirical_converse(fractional, plan), ValidityError);
    CHECK_THROWS_AS(empirical_converse(s, SamplingPlan{69, RngStream{}}), ValidityError);
}
