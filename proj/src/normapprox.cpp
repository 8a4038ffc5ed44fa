#include "fblrate/normapprox.hpp"

#include "fblrate/error.hpp"
#include "fblrate/randmat.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

namespace fblrate {

namespace {

void append(std::string& out, const std::string& item)
{
    if (!out.empty()) {
        out += "; ";
    }
    out += item;
}

void require_dimensions(int T, int n_t, int n_r)
{
    if (auto v = dimension_violation(T, n_t, n_r)) {
        throw ValidityError(*v);
    }
}

void require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ValidityError(std::string(name) + " > 0 violated");
    }
}

void require_open_probability(Probability p)
{
    if (!(p.value() > 0.0 && p.value() < 1.0)) {
        throw ValidityError("0 < ε < 1 violated");
    }
}

int n_min(int n_t, int n_r)
{
    if (n_t < 1 || n_r < 1) {
        throw DimensionError("antenna counts must be >= 1");
    }
    return std::min(n_t, n_r);
}

} // namespace

std::optional<std::string> dimension_violation(int T, int n_t, int n_r)
{
    std::string out;
    if (n_t < 1) {
        append(out, "n_t ≥ 1 violated (n_t=" + std::to_string(n_t) + ")");
    }
    if (n_r < n_t) {
        append(out, "n_r ≥ n_t violated (n_t=" + std::to_string(n_t) + ", n_r=" + std::to_string(n_r) + ")");
    }
    if (T < n_t + n_r) {
        append(out, "T ≥ n_t + n_r violated (T=" + std::to_string(T) +
                        ", n_t + n_r=" + std::to_string(n_t + n_r) + ")");
    }
    if (out.empty()) {
        return std::nullopt;
    }
    return out;
}

std::optional<std::string> Scenario::violation() const
{
    std::string out;
    if (auto v = dimension_violation(T, n_t, n_r)) {
        out = *v;
    }
    if (!(eps.value() > 0.0 && eps.value() < 0.5)) {
        std::ostringstream msg;
        msg << "0 < ε < 1/2 violated (ε=" << eps.value() << ")";
        append(out, msg.str());
    }
    if (!(L > 0.0) || !std::isfinite(L)) {
        append(out, "L > 0 violated");
    }
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        append(out, "ρ > 0 violated");
    }
    if (out.empty()) {
        return std::nullopt;
    }
    return out;
}

void Scenario::require_valid() const
{
    if (auto v = violation()) {
        throw ValidityError(*v);
    }
}

double elogdet_wishart(int n_t, int n_r)
{
    if (n_t < 1 || n_r < n_t) {
        throw DimensionError("elogdet_wishart: need n_r >= n_t >= 1");
    }
    double sum = 0.0;
    for (int i = 0; i < n_t; ++i) {
        sum += digamma(n_r - i);
    }
    return sum;
}

double varlogdet_wishart(int n_t, int n_r)
{
    if (n_t < 1 || n_r < n_t) {
        throw DimensionError("varlogdet_wishart: need n_r >= n_t >= 1");
    }
    double sum = 0.0;
    for (int i = 0; i < n_t; ++i) {
        sum += trigamma(n_r - i);
    }
    return sum;
}

double i_tilde(int T, double rho, int n_t, int n_r)
{
    require_dimensions(T, n_t, n_r);
    require_positive(rho, "ρ");
    const double nt = n_t;
    const double frac = 1.0 - nt / T;
    return nt * frac * std::log(rho / nt) + nt * frac * (std::log(static_cast<double>(T)) - 1.0) +
           (log_multivariate_gamma(n_t, nt) - log_multivariate_gamma(n_t, T)) / T +
           frac * elogdet_wishart(n_t, n_r);
}

double i_tilde_from_elogdet(int T, double rho, int n_t, double elogdet)
{
    if (n_t < 1 || T <= n_t) {
        throw ValidityError("T > n_t ≥ 1 violated");
    }
    require_positive(rho, "ρ");
    const double nt = n_t;
    const double prelog = (T - nt) / T;
    const double coherent_high_snr = nt * std::log(rho / nt) + elogdet;
    const double snr_free = nt * prelog * std::log(T / std::numbers::e) +
                            (log_multivariate_gamma(n_t, nt) - log_multivariate_gamma(n_t, T)) / T;
    return prelog * coherent_high_snr + snr_free;
}

double v_tilde(int T, int n_t, int n_r)
{
    require_dimensions(T, n_t, n_r);
    const double r = static_cast<double>(n_t) / T;
    return r * (1.0 - r) + (1.0 - r) * (1.0 - r) * varlogdet_wishart(n_t, n_r);
}

RateBreakdown na_noncoherent(const Scenario& s)
{
    s.require_valid();
    const double capacity = i_tilde(s.T, s.rho, s.n_t, s.n_r);
    const double dispersion = std::sqrt(v_tilde(s.T, s.n_t, s.n_r) / s.L) * q_inverse(s.eps);
    return RateBreakdown::make(capacity, dispersion);
}

Probability eps_noncoherent(double k_bits, double n, int T, double rho, int n_t, int n_r)
{
    require_dimensions(T, n_t, n_r);
    require_positive(n, "n");
    if (!(k_bits >= 0.0)) {
        throw ValidityError("k ≥ 0 violated");
    }
    const double num = n * i_tilde(T, rho, n_t, n_r) - k_bits * std::numbers::ln2;
    return q_function(num / std::sqrt(n * T * v_tilde(T, n_t, n_r)));
}

double c_awgn(double rho, int n_t, int n_r)
{
    require_positive(rho, "ρ");
    const double m = n_min(n_t, n_r);
    return m * std::log1p(rho / m);
}

double v_awgn(double rho, int n_t, int n_r)
{
    require_positive(rho, "ρ");
    const double x = rho / n_min(n_t, n_r);
    return rho * (2.0 + x) / ((1.0 + x) * (1.0 + x));
}

RateBreakdown na_awgn(double n, Probability eps, double rho, int n_t, int n_r)
{
    if (!(n >= 1.0)) {
        throw ValidityError("n ≥ 1 violated");
    }
    require_open_probability(eps);
    return RateBreakdown::make(c_awgn(rho, n_t, n_r), std::sqrt(v_awgn(rho, n_t, n_r) / n) * q_inverse(eps),
                               std::log(n) / (2.0 * n));
}

Probability eps_awgn(double k_bits, double n, double rho, int n_t, int n_r)
{
    require_positive(n, "n");
    if (!(k_bits >= 0.0)) {
        throw ValidityError("k ≥ 0 violated");
    }
    const double num = n * c_awgn(rho, n_t, n_r) - k_bits * std::numbers::ln2 + 0.5 * std::log(n);
    return q_function(num / std::sqrt(n * v_awgn(rho, n_t, n_r)));
}

std::optional<CoherentMoments> WishartMomentCache::find(const Key& key) const
{
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return it->second;
}

CoherentMoments WishartMomentCache::insert(const Key& key, const CoherentMoments& value)
{
    std::unique_lock lock(mutex_);
    return entries_.try_emplace(key, value).first->second;
}

std::size_t WishartMomentCache::size() const
{
    std::shared_lock lock(mutex_);
    return entries_.size();
}

void WishartMomentCache::clear()
{
    std::unique_lock lock(mutex_);
    entries_.clear();
}

WishartMomentCache& WishartMomentCache::global()
{
    static WishartMomentCache cache;
    return cache;
}

namespace {

// Per-draw statistics of the eigenvalues λ_i of H Hᴴ, with a = ρ/n_t:
//   log_sum  Σ ln(1 + aλ)
//   penalty  Σ 1 − (1 + aλ)⁻²
//   c1, c2   Σ c(λ) and Σ c(λ)², c(x) = x/(1 + ax)
struct CoherentAccumulator {
    RunningMoments log_sum;
    RunningMoments penalty;
    RunningMoments c1;
    RunningMoments c2;

    void merge(const CoherentAccumulator& o)
    {
        log_sum.merge(o.log_sum);
        penalty.merge(o.penalty);
        c1.merge(o.c1);
        c2.merge(o.c2);
    }
};

CoherentMoments estimate_coherent(int T, double rho, int n_t, int n_r, const SamplingPlan& plan)
{
    const double a = rho / n_t;
    const auto acc = accumulate<CoherentAccumulator>(plan, [=](RandomSource& src, CoherentAccumulator& out) {
        const Eigen::VectorXd lambda = gram_eigenvalues(sample_cn_matrix(n_t, n_r, src));
        double log_sum = 0.0, penalty = 0.0, c1 = 0.0, c2 = 0.0;
        for (double l : lambda) {
            const double g = 1.0 + a * l;
            log_sum += std::log1p(a * l);
            penalty += 1.0 - 1.0 / (g * g);
            const double c = l / g;
            c1 += c;
            c2 += c * c;
        }
        out.log_sum.add(log_sum);
        out.penalty.add(penalty);
        out.c1.add(c1);
        out.c2.add(c2);
    });

    const auto cap = acc.log_sum.mean_estimate();
    const auto var = acc.log_sum.variance_estimate();
    const auto pen = acc.penalty.mean_estimate();
    const auto eta1 = acc.c2.mean_estimate();
    const auto c1 = acc.c1.mean_estimate();
    const double eta2 = c1.mean * c1.mean;

    const double dispersion = T * var.mean + pen.mean + a * a * (eta1.mean - eta2 / n_t);
    // Delta-method error, treating the four estimates as independent.
    const double d_eta2 = 2.0 * c1.mean * c1.std_error / n_t;
    const double se = std::sqrt(std::pow(T * var.std_error, 2) + std::pow(pen.std_error, 2) +
                                std::pow(a * a * eta1.std_error, 2) + std::pow(a * a * d_eta2, 2));

    CoherentMoments out;
    out.capacity = cap;
    out.dispersion = MCEstimate{dispersion, se * se * static_cast<double>(acc.log_sum.count()),
                                acc.log_sum.count(), se};
    return out;
}

} // namespace

CoherentMoments coherent_moments(int T, double rho, int n_t, int n_r, const SamplingPlan& plan,
                                 WishartMomentCache* cache)
{
    if (n_t < 1 || n_r < 1 || T < 1) {
        throw DimensionError("coherent_moments: n_t, n_r, T must be >= 1");
    }
    require_positive(rho, "ρ");
    if (plan.samples < 1) {
        throw DomainError("coherent_moments: samples must be >= 1");
    }
    const WishartMomentCache::Key key{n_t, n_r, rho, T, plan.samples, plan.stream.seed, plan.stream.stream_index};
    if (cache) {
        if (auto hit = cache->find(key)) {
            return *hit;
        }
    }
    const CoherentMoments fresh = estimate_coherent(T, rho, n_t, n_r, plan);
    return cache ? cache->insert(key, fresh) : fresh;
}

Probability eps_coherent(double k_bits, double n, int T, double rho, int n_t, int n_r, const SamplingPlan& plan,
                         WishartMomentCache* cache)
{
    require_positive(n, "n");
    if (!(k_bits >= 0.0)) {
        throw ValidityError("k ≥ 0 violated");
    }
    const auto m = coherent_moments(T, rho, n_t, n_r, plan, cache);
    return q_function((n * m.capacity.mean - k_bits * std::numbers::ln2) / std::sqrt(n * m.dispersion.mean));
}

RateBreakdown na_coherent(const Scenario& s, const SamplingPlan& plan, WishartMomentCache* cache)
{
    require_positive(s.L, "L");
    require_open_probability(s.eps);
    const auto m = coherent_moments(s.T, s.rho, s.n_t, s.n_r, plan, cache);
    return RateBreakdown::make(m.capacity.mean, std::sqrt(m.dispersion.mean / s.blocklength()) * q_inverse(s.eps));
}

} // namespace fblrate
