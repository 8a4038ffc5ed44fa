#include "fblrate/mcbounds.hpp"

#include "fblrate/error.hpp"
#include "fblrate/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>

namespace fblrate {

namespace {

constexpr double kTieSeparation = 1e-9;

double log_gamma_ratio(int n_t, int T)
{
    return log_multivariate_gamma(n_t, n_t) - log_multivariate_gamma(n_t, T);
}

void require_jbar_shape(const PowerAllocation& d, int T, double rho, int n_r)
{
    if (d.n_t() < 1 || n_r < 1) {
        throw DimensionError("j̄ needs n_t >= 1 and n_r >= 1");
    }
    if (T < d.n_t() + 1) {
        throw DimensionError("j̄ needs T >= n_t + 1");
    }
    d.require_feasible(T, rho);
}

void require_converse_dims(int T, int n_t, int n_r)
{
    if (auto v = dimension_violation(T, n_t, n_r)) {
        throw ValidityError(*v);
    }
}

// Terms of j̄ that do not depend on the random draws.
double jbar_closed_terms(const PowerAllocation& d, int T, double rho, int n_r)
{
    const int n_t = d.n_t();
    double log_det_power = 0.0;
    for (double di : d.diag) {
        log_det_power += std::log1p(di * di);
    }
    return n_t * n_r * std::log(T * rho / n_t) + log_gamma_ratio(n_t, T) + (T - n_t - n_r) * log_det_power;
}

// ln det(HHᴴ + λ₁(QᴴQ)(I + D²)⁻¹), plus tr(HᴴH) for the Z′ term.
struct LogDetDraw {
    double log_det;
    double trace_h;
};

LogDetDraw draw_log_det(const PowerAllocation& d, int T, int n_r, RandomSource& source)
{
    const int n_t = d.n_t();
    const ComplexMatrix h = sample_cn_matrix(n_t, n_r, source);
    const double l1 = lambda1(T - n_t, n_r, source);
    ComplexMatrix m = h * h.adjoint();
    for (int i = 0; i < n_t; ++i) {
        m(i, i) += l1 / (1.0 + d.diag[static_cast<std::size_t>(i)] * d.diag[static_cast<std::size_t>(i)]);
    }
    return {log_det_hpd(m), h.squaredNorm()};
}

struct Threshold {
    double bound;
    double log_xi;
    double tail;
};

// min over sample values t of t − ln(1 − ε − P̂(S ≥ t)); `sorted` ascending.
std::optional<Threshold> minimize_bound(const std::vector<double>& sorted, double eps)
{
    const double n = static_cast<double>(sorted.size());
    std::optional<Threshold> best;
    std::size_t i = 0;
    while (i < sorted.size()) {
        const double t = sorted[i];
        const double tail = (n - static_cast<double>(i)) / n;
        const double slack = 1.0 - eps - tail;
        if (slack > 0.0) {
            const double b = t - std::log(slack);
            if (!best || b < best->bound) {
                best = Threshold{b, t, tail};
            }
        }
        while (i < sorted.size() && sorted[i] == t) {
            ++i;
        }
    }
    return best;
}

} // namespace

double PowerAllocation::trace() const noexcept
{
    double sum = 0.0;
    for (double di : diag) {
        sum += di * di;
    }
    return sum;
}

PowerAllocation PowerAllocation::equal_power(int n_t, int T, double rho)
{
    if (n_t < 1 || T < 1 || !(rho > 0.0)) {
        throw DomainError("equal_power needs n_t >= 1, T >= 1 and ρ > 0");
    }
    return PowerAllocation{std::vector<double>(static_cast<std::size_t>(n_t), std::sqrt(T * rho / n_t))};
}

void PowerAllocation::require_feasible(int T, double rho) const
{
    for (double di : diag) {
        if (!(di >= 0.0) || !std::isfinite(di)) {
            throw DomainError("power allocation entries must be finite and >= 0");
        }
    }
    if (trace() > T * rho * (1.0 + 1e-12)) {
        throw DomainError("power allocation violates tr(D²) ≤ Tρ");
    }
}

double conditional_log_pdf(const ComplexMatrix& y, const ComplexMatrix& x)
{
    if (y.rows() != x.rows() || y.rows() < 1 || y.cols() < 1 || x.cols() < 1) {
        throw DimensionError("conditional_log_pdf: Y must be T×n_r and X must be T×n_t");
    }
    const Eigen::Index T = y.rows();
    const double n_r = static_cast<double>(y.cols());
    const ComplexMatrix cov = ComplexMatrix::Identity(T, T) + x * x.adjoint();
    Eigen::LLT<ComplexMatrix> llt(cov);
    const double quad = (y.adjoint() * llt.solve(y)).trace().real();
    const ComplexMatrix small = ComplexMatrix::Identity(x.cols(), x.cols()) + x.adjoint() * x;
    return -quad - n_r * static_cast<double>(T) * std::log(std::numbers::pi) - n_r * log_det_hpd(small);
}

double conditional_log_pdf_unit(const ComplexMatrix& y, const ComplexMatrix& u, double rho)
{
    if (y.rows() != u.rows() || y.rows() < 1 || u.cols() < 1) {
        throw DimensionError("conditional_log_pdf_unit: Y must be T×n_r and U must be T×n_t");
    }
    const double T = static_cast<double>(y.rows());
    const double n_t = static_cast<double>(u.cols());
    const double n_r = static_cast<double>(y.cols());
    const double mu = rho * T / n_t;
    // With orthonormal columns, (I + μUUᴴ)⁻¹ = I − μ/(1+μ)·UUᴴ.
    const ComplexMatrix uy = u.adjoint() * y;
    const double quad = y.squaredNorm() - mu / (1.0 + mu) * uy.squaredNorm();
    return -quad - n_r * T * std::log(std::numbers::pi) - n_t * n_r * std::log1p(mu);
}

double aux_log_pdf(const ComplexMatrix& y, double rho, int n_t)
{
    const int T = static_cast<int>(y.rows());
    const int n_r = static_cast<int>(y.cols());
    if (n_t < 1 || n_r < n_t || T < n_r || T < n_t) {
        throw DimensionError("aux_log_pdf: need T >= n_r >= n_t >= 1");
    }
    if (!(rho > 0.0)) {
        throw DomainError("aux_log_pdf: ρ must be positive");
    }
    const double mu = T * rho / n_t;
    const auto spectrum = singular_values(y);
    std::vector<double> s2(spectrum.values.size());
    std::transform(spectrum.values.begin(), spectrum.values.end(), s2.begin(), [](double s) { return s * s; });
    // Separate coincident values so that every ln(σ_i² − σ_j²) is defined.
    for (std::size_t k = 1; k < s2.size(); ++k) {
        const double cap = s2[k - 1] * (1.0 - kTieSeparation);
        if (s2[k] > cap) {
            s2[k] = cap;
        }
    }

    double value = -n_t * n_r * std::log(mu) - n_r * T * std::log(std::numbers::pi) +
                   log_multivariate_gamma(n_t, T) - log_multivariate_gamma(n_t, n_t);
    for (int i = 0; i < n_r; ++i) {
        const double s = s2[static_cast<std::size_t>(i)];
        if (i < n_t) {
            if (!(s > 0.0)) {
                throw DegenerateSpectrumError("aux_log_pdf: Y has fewer than n_t nonzero singular values");
            }
            value -= s / mu + (T - 2 * n_r + n_t) * std::log(s);
        } else {
            value -= s;
        }
    }
    for (int i = 0; i < n_t; ++i) {
        for (int j = n_t; j < n_r; ++j) {
            const double gap = s2[static_cast<std::size_t>(i)] - s2[static_cast<std::size_t>(j)];
            if (!(gap > 0.0)) {
                throw DegenerateSpectrumError("aux_log_pdf: coincident singular values");
            }
            value -= 2.0 * std::log(gap);
        }
    }
    return value;
}

double mismatched_info_density(const ComplexMatrix& x, const ComplexMatrix& y, double rho, int n_t)
{
    return conditional_log_pdf(y, x) - aux_log_pdf(y, rho, n_t);
}

double sample_jbar(const PowerAllocation& d, int T, double rho, int n_r, RandomSource& source)
{
    require_jbar_shape(d, T, rho, n_r);
    const int n_t = d.n_t();
    const auto draw = draw_log_det(d, T, n_r, source);
    double z2 = 0.0;
    for (int i = 0; i < n_t; ++i) {
        z2 += source.gamma(T - n_t);
    }
    const double coef = (d.alpha(T) - rho) / rho;
    return jbar_closed_terms(d, T, rho, n_r) + coef * draw.trace_h - z2 + (T - n_t) * draw.log_det;
}

double sample_jbar(const PowerAllocation& d, int T, double rho, int n_r, RngStream stream)
{
    RandomSource source(stream);
    return sample_jbar(d, T, rho, n_r, source);
}

MCEstimate jbar_mean(const PowerAllocation& d, int T, double rho, int n_r, const SamplingPlan& plan)
{
    require_jbar_shape(d, T, rho, n_r);
    const int n_t = d.n_t();
    const auto m = accumulate<RunningMoments>(plan, [&d, T, n_r](RandomSource& src, RunningMoments& acc) {
        acc.add(draw_log_det(d, T, n_r, src).log_det);
    });
    const double coef = (d.alpha(T) - rho) / rho;
    const double closed = jbar_closed_terms(d, T, rho, n_r) + coef * n_r * n_t - n_t * (T - n_t);
    const double scale = T - n_t;
    return MCEstimate{closed + scale * m.mean(), scale * scale * m.variance(), m.count(),
                      scale * m.mean_estimate().std_error};
}

MCEstimate ubar_var(const PowerAllocation& d, int T, double rho, int n_r, const SamplingPlan& plan)
{
    require_jbar_shape(d, T, rho, n_r);
    const auto m = accumulate<RunningMoments>(plan, [&d, T, rho, n_r](RandomSource& src, RunningMoments& acc) {
        acc.add(sample_jbar(d, T, rho, n_r, src));
    });
    return m.variance_estimate();
}

double delta_bar(int T, int n_t, int n_r)
{
    if (n_t < 1 || n_r < n_t) {
        throw DimensionError("delta_bar: need n_r >= n_t >= 1");
    }
    if (T < 1) {
        throw DimensionError("delta_bar: need T >= 1");
    }
    const double mean = elogdet_wishart(n_t, n_r);
    const double second_moment = mean * mean + varlogdet_wishart(n_t, n_r);
    return static_cast<double>(T) / n_t - T / (2.0 * n_r * std::sqrt(n_t) * std::sqrt(second_moment) + 1.0);
}

double jbar_D1(int T, double rho, int n_t, int n_r)
{
    require_converse_dims(T, n_t, n_r);
    return n_t * n_r * std::log(T * rho / n_t) + log_gamma_ratio(n_t, T) - n_t * (T - n_t) +
           (T - n_t - n_r) * n_t * std::log1p(T * rho / n_t) + (T - n_t) * elogdet_wishart(n_t, n_r);
}

namespace {

// ln[(1 + δ̄ρ)(1 + (T − δ̄)ρ/(n_t − 1))^{n_t − 1}]; the second factor is empty for n_t = 1.
double d2_power_block(int T, double rho, int n_t, double db)
{
    double value = std::log1p(db * rho);
    if (n_t > 1) {
        value += (n_t - 1) * std::log1p((T - db) * rho / (n_t - 1));
    }
    return value;
}

} // namespace

double jbar_D2(int T, double rho, int n_t, int n_r)
{
    require_converse_dims(T, n_t, n_r);
    return n_t * n_r * std::log(T * rho / n_t) + log_gamma_ratio(n_t, T) - n_t * (T - n_t) +
           (T - n_t) * elogdet_wishart(n_t, n_r) + (T - n_t - n_r) * d2_power_block(T, rho, n_t, delta_bar(T, n_t, n_r));
}

double xi_gap(int T, double rho, int n_t, int n_r)
{
    require_converse_dims(T, n_t, n_r);
    const double db = delta_bar(T, n_t, n_r);
    return (T - n_t - n_r) * (n_t * std::log1p(T * rho / n_t) - d2_power_block(T, rho, n_t, db));
}

double xi_gap_limit(int T, int n_t, int n_r)
{
    require_converse_dims(T, n_t, n_r);
    const double db = delta_bar(T, n_t, n_r);
    double log_ratio = n_t * std::log(static_cast<double>(T) / n_t) - std::log(db);
    if (n_t > 1) {
        log_ratio -= (n_t - 1) * std::log((T - db) / (n_t - 1));
    }
    return (T - n_t - n_r) * log_ratio;
}

IstarParts istar_parts(int T, int n_t, int n_r, RandomSource& source)
{
    if (n_t < 1 || n_r < n_t) {
        throw DimensionError("istar: need n_r >= n_t >= 1");
    }
    if (T <= n_t) {
        throw DimensionError("istar: need T > n_t");
    }
    const double shape = static_cast<double>(n_t) * (T - n_t);
    const double wishart = (T - n_t) * (wishart_logdet(n_t, n_r, source) - elogdet_wishart(n_t, n_r));
    const double noise = source.gamma(shape) - shape;
    return {wishart, noise};
}

double istar_centered_sample(int T, int n_t, int n_r, RandomSource& source)
{
    return istar_parts(T, n_t, n_r, source).value();
}

double istar_centered_sample(int T, int n_t, int n_r, RngStream stream)
{
    RandomSource source(stream);
    return istar_centered_sample(T, n_t, n_r, source);
}

EmpiricalConverseResult empirical_converse(const Scenario& s, const SamplingPlan& plan)
{
    // The meta-converse holds for every ε in (0, 1); only the dimension part
    // of the validity region applies here.
    require_converse_dims(s.T, s.n_t, s.n_r);
    if (!(s.eps.value() > 0.0 && s.eps.value() < 1.0)) {
        throw ValidityError("0 < ε < 1 violated");
    }
    if (!(s.rho > 0.0)) {
        throw ValidityError("ρ > 0 violated");
    }
    if (!(s.L >= 1.0) || std::floor(s.L) != s.L) {
        throw ValidityError("empirical converse needs an integer L ≥ 1");
    }
    const auto blocks = static_cast<std::int64_t>(s.L);
    if (plan.samples < 10 * blocks) {
        throw ValidityError("empirical converse needs samples ≥ 10·L (samples=" + std::to_string(plan.samples) +
                            ", L=" + std::to_string(blocks) + ")");
    }
    const std::int64_t realizations = plan.samples / blocks;
    const auto d = PowerAllocation::equal_power(s.n_t, s.T, s.rho);

    SamplingPlan sums = plan;
    sums.samples = realizations;
    const int T = s.T;
    const double rho = s.rho;
    const int n_r = s.n_r;
    const std::vector<double> draws = collect_samples(sums, [&d, T, rho, n_r, blocks](RandomSource& src) {
        double total = 0.0;
        for (std::int64_t l = 0; l < blocks; ++l) {
            total += sample_jbar(d, T, rho, n_r, src);
        }
        return total;
    });

    const double eps = s.eps.value();
    const double per_cu = static_cast<double>(blocks) * T;
    std::vector<double> sorted = draws;
    std::sort(sorted.begin(), sorted.end());
    const auto best = minimize_bound(sorted, eps);
    if (!best) {
        throw InfeasibleError("no sample threshold has tail estimate below 1 − ε; increase samples or lower ε");
    }

    EmpiricalConverseResult out;
    out.rate_upper_bound = best->bound / per_cu;
    out.threshold_log_xi = best->log_xi;
    out.tail_estimate = Probability(best->tail);
    out.samples = realizations;
    out.block_draws = realizations * blocks;

    // Bootstrap over the realizations. The minimizing threshold sits in the
    // lower tail of S, so the estimate behaves like an order statistic and
    // batch means would understate its spread.
    constexpr int kResamples = 200;
    RandomSource resampler(plan.stream.substream(0xb0075ULL));
    std::uniform_int_distribution<std::size_t> pick(0, draws.size() - 1);
    RunningMoments boot;
    std::vector<double> resample(draws.size());
    for (int r = 0; r < kResamples; ++r) {
        for (auto& v : resample) {
            v = draws[pick(resampler.engine())];
        }
        std::sort(resample.begin(), resample.end());
        if (const auto b = minimize_bound(resample, eps)) {
            boot.add(b->bound / per_cu);
        }
    }
    if (boot.count() >= kResamples / 2) {
        out.std_error = std::sqrt(boot.variance());
    } else {
        // Binomial delta method on the tail estimate.
        const double n = static_cast<double>(realizations);
        const double sd_tail = std::sqrt(best->tail * (1.0 - best->tail) / n);
        out.std_error = sd_tail / (1.0 - eps - best->tail) / per_cu;
    }
    return out;
}

} // namespace fblrate
