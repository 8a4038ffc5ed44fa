#include "doctest.h"

#include "fblrate/error.hpp"
#include "fblrate/normapprox.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

using namespace fblrate;

namespace {

double db(double value) { return std::pow(10.0, value / 10.0); }

Scenario scenario(int n_t, int n_r, int T, double L, double rho, double eps)
{
    return Scenario{n_t, n_r, T, L, rho, Probability(eps)};
}

} // namespace

TEST_CASE("Wishart log-det moments")
{
    CHECK(elogdet_wishart(1, 1) == doctest::Approx(-0.5772156649015329).epsilon(1e-13));
    CHECK(elogdet_wishart(1, 2) == doctest::Approx(0.4227843350984671).epsilon(1e-13));
    CHECK(elogdet_wishart(2, 2) == doctest::Approx(-0.1544313298030657).epsilon(1e-12));
    CHECK(varlogdet_wishart(1, 1) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-13));
    CHECK(varlogdet_wishart(1, 2) == doctest::Approx(0.6449340668482264).epsilon(1e-13));
    CHECK(varlogdet_wishart(2, 4) == doctest::Approx(0.6787570225853418).epsilon(1e-13));
    CHECK_THROWS_AS(elogdet_wishart(3, 2), DimensionError);
    CHECK_THROWS_AS(varlogdet_wishart(0, 2), DimensionError);
}

TEST_CASE("i_tilde")
{
    CHECK(std::abs(i_tilde(2, 100.0, 1, 1) - 1.8605508508232519) < 1e-12);

    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 500; ++trial) {
        const int n_t = 1 + static_cast<int>(gen() % 6);
        const int n_r = n_t + static_cast<int>(gen() % 4);
        const int T = n_t + n_r + static_cast<int>(gen() % 60);
        const double rho = db(-10.0 + 50.0 * std::uniform_real_distribution<double>()(gen));
        const double a = i_tilde(T, rho, n_t, n_r);
        const double b = i_tilde_from_elogdet(T, rho, n_t, elogdet_wishart(n_t, n_r));
        CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("i_tilde pre-log")
{
    const double rho = 1e12;
    for (auto [n_t, n_r, T] : {std::tuple{1, 1, 2}, std::tuple{2, 2, 8}, std::tuple{2, 4, 24}, std::tuple{4, 4, 64}}) {
        const double prelog = n_t * (1.0 - static_cast<double>(n_t) / T);
        const double slope = (i_tilde(T, rho, n_t, n_r) - i_tilde(T, rho / 10.0, n_t, n_r)) / std::log(10.0);
        CHECK(slope == doctest::Approx(prelog).epsilon(1e-9));
        // The ratio itself converges slowly; at 10^12 it is within a few percent.
        CHECK(i_tilde(T, rho, n_t, n_r) / std::log(rho) == doctest::Approx(prelog).epsilon(0.1));
    }
}

TEST_CASE("validity messages name the violated inequality")
{
    try {
        i_tilde(24, 100.0, 4, 1);
        FAIL("expected ValidityError");
    } catch (const ValidityError& e) {
        CHECK(std::string(e.what()).find("n_r ≥ n_t") != std::string::npos);
    }
    try {
        v_tilde(3, 2, 2);
        FAIL("expected ValidityError");
    } catch (const ValidityError& e) {
        CHECK(std::string(e.what()).find("T ≥ n_t + n_r") != std::string::npos);
    }
    const auto s = scenario(1, 1, 2, 10, 100.0, 0.6);
    REQUIRE(s.violation().has_value());
    CHECK(s.violation()->find("ε < 1/2") != std::string::npos);
    CHECK(scenario(2, 2, 4, 1, 1.0, 0.1).valid());
    CHECK_THROWS_AS(na_noncoherent(scenario(3, 2, 10, 4, 100.0, 1e-3)), ValidityError);
}

TEST_CASE("v_tilde")
{
    CHECK(std::abs(v_tilde(2, 1, 1) - 0.6612335167120566) < 1e-12);
    const double expected = (2.0 / 24) * (22.0 / 24) + (22.0 / 24) * (22.0 / 24) * 0.6787570225853418;
    CHECK(std::abs(v_tilde(24, 2, 4) - expected) < 1e-12);
    for (int n_t = 1; n_t <= 4; ++n_t) {
        for (int n_r = n_t; n_r <= 8; ++n_r) {
            for (int T = n_t + n_r; T <= 40; ++T) {
                CHECK(v_tilde(T, n_t, n_r) >= 0.0);
            }
        }
    }
}

TEST_CASE("na_noncoherent")
{
    const auto r = na_noncoherent(scenario(1, 1, 2, 84, 100.0, 1e-3));
    CHECK(std::abs(r.total - 1.5863751798631213) < 1e-9);
    CHECK(r.correction_term == 0.0);
    CHECK(r.total == r.capacity_term - r.dispersion_term + r.correction_term);

    const auto half = na_noncoherent(scenario(2, 2, 8, 10, 100.0, 0.5 - 1e-12));
    CHECK(std::abs(half.dispersion_term) < 1e-10);

    const auto big = na_noncoherent(scenario(2, 2, 8, 1e12, 100.0, 1e-3));
    CHECK(std::abs(big.total - i_tilde(8, 100.0, 2, 2)) < 1e-4);
}

TEST_CASE("na_noncoherent is strictly increasing in n_r")
{
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 50; ++trial) {
        const int n_t = 1 + static_cast<int>(gen() % 4);
        const int T = n_t + 8 + static_cast<int>(gen() % 40);
        const double L = 1.0 + static_cast<double>(gen() % 50);
        const double rho = db(5.0 + 30.0 * std::uniform_real_distribution<double>()(gen));
        const double eps = std::pow(10.0, -1.0 - 6.0 * std::uniform_real_distribution<double>()(gen));
        double previous = -INFINITY;
        for (int n_r = n_t; n_r <= 8; ++n_r) {
            const double total = na_noncoherent(scenario(n_t, n_r, T, L, rho, eps)).total;
            CHECK(total > previous);
            previous = total;
        }
    }
}

TEST_CASE("eps_noncoherent inverts the normal approximation")
{
    const auto s = scenario(1, 2, 24, 7, db(25.0), 1e-5);
    const double n = s.blocklength();
    const double k = n * na_noncoherent(s).total / std::numbers::ln2;
    CHECK(std::abs(eps_noncoherent(k, n, s.T, s.rho, s.n_t, s.n_r).value() - 1e-5) < 1e-9);

    CHECK(eps_noncoherent(0.0, 400.0, 8, 1e4, 2, 2).value() < 1e-12);
    double previous = -1.0;
    for (double bits = 0.0; bits < 3000.0; bits += 25.0) {
        const double e = eps_noncoherent(bits, 168.0, 24, db(25.0), 2, 2).value();
        CHECK(e >= previous);
        if (e > 1e-300 && e < 1.0 - 1e-16) {
            CHECK(e > previous);
        }
        previous = e;
    }
    CHECK_THROWS_AS(eps_noncoherent(10.0, 100.0, 4, 100.0, 3, 2), ValidityError);
}

TEST_CASE("AWGN normal approximation")
{
    CHECK(c_awgn(1.0, 1, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(v_awgn(1.0, 1, 3) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(v_awgn(1e9, 1, 1) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(c_awgn(1e-12, 2, 2) < 1e-11);
    CHECK(v_awgn(1e-12, 2, 2) < 1e-11);
    CHECK(c_awgn(10.0, 4, 2) == doctest::Approx(2.0 * std::log(6.0)));

    const double n = 480.0 / 7.0;
    const double rho = db(25.0);
    const Probability eps(0.0462);
    const auto r = na_awgn(n, eps, rho, 1, 1);
    CHECK(r.total == r.capacity_term - r.dispersion_term + r.correction_term);
    CHECK(r.correction_term == doctest::Approx(std::log(n) / (2.0 * n)));
    const double k = n * r.total / std::numbers::ln2;
    CHECK(std::abs(eps_awgn(k, n, rho, 1, 1).value() - 0.0462) < 1e-9);

    const auto half = na_awgn(200.0, Probability(0.5), rho, 1, 1);
    CHECK(half.total == doctest::Approx(c_awgn(rho, 1, 1) + std::log(200.0) / 400.0).epsilon(1e-14));
    CHECK(na_awgn(1e12, Probability(1e-3), rho, 1, 1).total == doctest::Approx(c_awgn(rho, 1, 1)).epsilon(1e-5));

    const double threshold = (200.0 * c_awgn(rho, 1, 1) + 0.5 * std::log(200.0)) / std::numbers::ln2;
    CHECK(eps_awgn(threshold, 200.0, rho, 1, 1).value() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(eps_awgn(0.0, 2000.0, rho, 1, 1).value() < 1e-100);
    double previous = -1.0;
    for (double bits = 0.0; bits < 1200.0; bits += 10.0) {
        const double e = eps_awgn(bits, 200.0, rho, 1, 1).value();
        CHECK(e >= previous);
        previous = e;
    }
}

TEST_CASE("coherent moments")
{
    WishartMomentCache cache;
    SamplingPlan plan{400'000, RngStream{2024, 0}};
    const auto m = coherent_moments(4, 10.0, 1, 1, plan, &cache);
    // E[ln(1 + 10x)], x ~ Exp(1), by quadrature.
    CHECK(std::abs(m.capacity.mean - 2.0146425447084517) < 3.0 * m.capacity.std_error);
    CHECK(m.capacity.samples == 400'000);
    CHECK(m.dispersion.mean > 0.0);
    CHECK(m.dispersion.std_error > 0.0);
    CHECK(cache.size() == 1);

    const auto again = coherent_moments(4, 10.0, 1, 1, plan, &cache);
    CHECK(again.capacity.mean == m.capacity.mean);
    CHECK(again.dispersion.mean == m.dispersion.mean);
    CHECK(cache.size() == 1);

    SamplingPlan other = plan;
    other.stream.seed = 2025;
    coherent_moments(4, 10.0, 1, 1, other, &cache);
    CHECK(cache.size() == 2);

    const auto tiny = coherent_moments(4, 1e-9, 2, 2, SamplingPlan{20'000, RngStream{1, 0}}, nullptr);
    CHECK(tiny.capacity.mean < 1e-7);
}

TEST_CASE("coherent dispersion reduces to the SISO fast-fading form at T = 1")
{
    // For n_t = n_r = 1 and T = 1: V = Var ln(1+ρλ) + 1 − (E[1/(1+ρλ)])².
    SamplingPlan plan{200'000, RngStream{9, 9}};
    const double rho = 5.0;
    const auto m = coherent_moments(1, rho, 1, 1, plan, nullptr);
    plan.execution = Execution::serial;
    struct Pair {
        RunningMoments a, b;
        void merge(const Pair& o)
        {
            a.merge(o.a);
            b.merge(o.b);
        }
    };
    const auto p = accumulate<Pair>(plan, [rho](RandomSource& src, Pair& acc) {
        const auto h = src.normal() * std::sqrt(0.5);
        const auto g = src.normal() * std::sqrt(0.5);
        const double lambda = h * h + g * g;
        acc.a.add(std::log1p(rho * lambda));
        acc.b.add(1.0 / (1.0 + rho * lambda));
    });
    const double expected = p.a.variance() + 1.0 - p.b.mean() * p.b.mean();
    CHECK(m.dispersion.mean == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("eps_coherent")
{
    WishartMomentCache cache;
    SamplingPlan plan{50'000, RngStream{77, 0}};
    const auto m = coherent_moments(24, db(25.0), 2, 2, plan, &cache);
    const double n = 168.0;
    const double k_half = n * m.capacity.mean / std::numbers::ln2;
    CHECK(eps_coherent(k_half, n, 24, db(25.0), 2, 2, plan, &cache).value() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(eps_coherent(0.0, n, 24, db(25.0), 2, 2, plan, &cache).value() < 1e-10);

    double previous = 1.0;
    for (double snr_db = 10.0; snr_db <= 30.0; snr_db += 2.0) {
        const double e = eps_coherent(400.0, n, 24, db(snr_db), 2, 2, plan, &cache).value();
        CHECK(e < previous);
        previous = e;
    }

    const auto s = scenario(2, 2, 24, 7, db(25.0), 1e-3);
    const auto r = na_coherent(s, plan, &cache);
    const double k = s.blocklength() * r.total / std::numbers::ln2;
    CHECK(eps_coherent(k, s.blocklength(), 24, s.rho, 2, 2, plan, &cache).value() ==
          doctest::Approx(1e-3).epsilon(1e-9));
}

TEST_CASE("coherent normal approximation dominates the noncoherent one")
{
    WishartMomentCache cache;
    SamplingPlan plan{50'000, RngStream{13, 0}};
    for (double snr_db : {15.0, 25.0}) {
        double previous_cost = INFINITY;
        double previous_gap = INFINITY;
        for (int T = 4; T <= 84; ++T) {
            const auto s = scenario(2, 2, T, 168.0 / T, db(snr_db), 1e-3);
            const auto coherent = na_coherent(s, plan, &cache);
            const auto noncoherent = na_noncoherent(s);
            CAPTURE(T);
            CHECK(coherent.total > noncoherent.total);
            // Channel-estimation cost in the first-order term.
            const double cost = coherent.capacity_term - noncoherent.capacity_term;
            CHECK(cost < previous_cost);
            previous_cost = cost;
            // At 15 dB the noncoherent dispersion overtakes the shrinking
            // estimation cost for large T, so the total gap is only
            // monotone at the higher SNR.
            const double gap = coherent.total - noncoherent.total;
            if (snr_db == 25.0 && T % 4 == 0) {
                CHECK(gap < previous_gap);
                previous_gap = gap;
            }
        }
    }
}
