#pragma once

// Normal approximations of the maximum coding rate and their inversions.
//
// Rates are in nats per channel use, payloads in bits. L is real so that
// fixed-blocklength sweeps over T need not restrict to divisors of n.

#include "fblrate/moments.hpp"
#include "fblrate/parallel.hpp"
#include "fblrate/specfun.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>

namespace fblrate {

enum class ChannelKind { awgn, coherent, noncoherent };

struct Scenario {
    int n_t = 1;
    int n_r = 1;
    int T = 2;
    double L = 1.0;
    double rho = 1.0;
    Probability eps{1e-3};

    [[nodiscard]] double blocklength() const noexcept { return L * T; }

    /// Every violated inequality of the high-SNR validity region
    /// (T ≥ n_t + n_r, n_r ≥ n_t, ε < 1/2) and of the basic ranges, joined
    /// by "; ". Empty when the scenario is valid.
    [[nodiscard]] std::optional<std::string> violation() const;
    [[nodiscard]] bool valid() const { return !violation().has_value(); }

    /// Throws ValidityError carrying violation().
    void require_valid() const;
};

/// Same check as Scenario::violation without the ε and L conditions.
std::optional<std::string> dimension_violation(int T, int n_t, int n_r);

struct RateBreakdown {
    double capacity_term = 0.0;
    double dispersion_term = 0.0;
    double correction_term = 0.0;
    double total = 0.0;

    static RateBreakdown make(double capacity, double dispersion, double correction = 0.0)
    {
        return {capacity, dispersion, correction, capacity - dispersion + correction};
    }
};

/// E[ln det(H Hᴴ)] = Σ_{i<n_t} Ψ(n_r − i) for H n_t×n_r with CN(0,1) entries.
double elogdet_wishart(int n_t, int n_r);
/// Var[ln det(H Hᴴ)] = Σ_{i<n_t} Ψ′(n_r − i).
double varlogdet_wishart(int n_t, int n_r);

/// High-SNR capacity proxy Ĩ(T, ρ).
double i_tilde(int T, double rho, int n_t, int n_r);

/// Ĩ written as (1 − n_t/T)·[n_t ln(ρ/n_t) + elogdet] plus the SNR-free
/// terms, with the Wishart log-det mean supplied by the caller.
double i_tilde_from_elogdet(int T, double rho, int n_t, double elogdet);

/// High-SNR dispersion Ṽ(T).
double v_tilde(int T, int n_t, int n_r);

/// Ĩ − sqrt(Ṽ/L)·Q⁻¹(ε).
RateBreakdown na_noncoherent(const Scenario& s);

/// Q((nĨ − k ln 2) / sqrt(n T Ṽ)).
Probability eps_noncoherent(double k_bits, double n, int T, double rho, int n_t, int n_r);

double c_awgn(double rho, int n_t, int n_r);
double v_awgn(double rho, int n_t, int n_r);
/// C − sqrt(V/n)·Q⁻¹(ε) + ln(n)/(2n).
RateBreakdown na_awgn(double n, Probability eps, double rho, int n_t, int n_r);
Probability eps_awgn(double k_bits, double n, double rho, int n_t, int n_r);

struct CoherentMoments {
    MCEstimate capacity;   // C_c, nats per channel use
    MCEstimate dispersion; // V_c
};

/// Cache of coherent moments keyed by (n_t, n_r, ρ, T, samples, seed,
/// stream). Readers run concurrently; insertion is exclusive.
class WishartMomentCache {
public:
    using Key = std::tuple<int, int, double, int, std::int64_t, std::uint64_t, std::uint64_t>;

    [[nodiscard]] std::optional<CoherentMoments> find(const Key& key) const;
    /// Inserts unless present; returns the stored entry either way.
    CoherentMoments insert(const Key& key, const CoherentMoments& value);
    [[nodiscard]] std::size_t size() const;
    void clear();

    static WishartMomentCache& global();

private:
    mutable std::shared_mutex mutex_;
    std::map<Key, CoherentMoments> entries_;
};

/// Monte Carlo capacity and dispersion of the coherent Rayleigh block-fading
/// channel, all terms estimated on one shared set of eigenvalue draws.
/// Pass cache = nullptr to bypass caching.
CoherentMoments coherent_moments(int T, double rho, int n_t, int n_r, const SamplingPlan& plan,
                                 WishartMomentCache* cache = &WishartMomentCache::global());

/// Q((n C_c − k ln 2) / sqrt(n V_c)).
Probability eps_coherent(double k_bits, double n, int T, double rho, int n_t, int n_r, const SamplingPlan& plan,
                         WishartMomentCache* cache = &WishartMomentCache::global());

/// C_c − sqrt(V_c/n)·Q⁻¹(ε) with n = L·T.
RateBreakdown na_coherent(const Scenario& s, const SamplingPlan& plan,
                          WishartMomentCache* cache = &WishartMomentCache::global());

} // namespace fblrate
