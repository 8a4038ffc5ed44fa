#pragma once

#include <cmath>
#include <cstdint>

namespace fblrate {

/// Monte Carlo estimate of a mean with its sample variance.
/// std_error = sqrt(variance / samples).
struct MCEstimate {
    double mean = 0.0;
    double variance = 0.0;
    std::int64_t samples = 0;
    double std_error = 0.0;

    static MCEstimate from_moments(double mean, double variance, std::int64_t samples)
    {
        return MCEstimate{mean, variance, samples,
                          samples > 0 ? std::sqrt(variance / static_cast<double>(samples)) : 0.0};
    }
};

/// Streaming central moments up to order four (Pébay's one-pass and pairwise
/// update formulas). Merging two accumulators equals accumulating the
/// concatenated samples, up to rounding.
class RunningMoments {
public:
    void add(double x) noexcept
    {
        const double n1 = static_cast<double>(count_);
        ++count_;
        const double n = static_cast<double>(count_);
        const double delta = x - mean_;
        const double delta_n = delta / n;
        const double delta_n2 = delta_n * delta_n;
        const double term1 = delta * delta_n * n1;
        mean_ += delta_n;
        m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ - 4.0 * delta_n * m3_;
        m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
        m2_ += term1;
    }

    void merge(const RunningMoments& other) noexcept
    {
        if (other.count_ == 0) {
            return;
        }
        if (count_ == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(count_);
        const double nb = static_cast<double>(other.count_);
        const double n = na + nb;
        const double delta = other.mean_ - mean_;
        const double d2 = delta * delta;
        const double m2 = m2_ + other.m2_ + d2 * na * nb / n;
        const double m3 = m3_ + other.m3_ + d2 * delta * na * nb * (na - nb) / (n * n) +
                          3.0 * delta * (na * other.m2_ - nb * m2_) / n;
        const double m4 = m4_ + other.m4_ +
                          d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                          6.0 * d2 * (na * na * other.m2_ + nb * nb * m2_) / (n * n) +
                          4.0 * delta * (na * other.m3_ - nb * m3_) / n;
        mean_ += delta * nb / n;
        m2_ = m2;
        m3_ = m3;
        m4_ = m4;
        count_ += other.count_;
    }

    [[nodiscard]] std::int64_t count() const noexcept { return count_; }
    [[nodiscard]] double mean() const noexcept { return mean_; }

    /// Unbiased sample variance.
    [[nodiscard]] double variance() const noexcept
    {
        return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
    }

    /// Fourth central sample moment (biased).
    [[nodiscard]] double central_moment4() const noexcept
    {
        return count_ > 0 ? m4_ / static_cast<double>(count_) : 0.0;
    }

    /// The mean and its standard error.
    [[nodiscard]] MCEstimate mean_estimate() const noexcept
    {
        return MCEstimate::from_moments(mean_, variance(), count_);
    }

    /// The sample variance with the standard error of the sample variance,
    /// sqrt((m4 - (n-3)/(n-1) s⁴) / n).
    [[nodiscard]] MCEstimate variance_estimate() const noexcept
    {
        const double s2 = variance();
        const double n = static_cast<double>(count_);
        double var_of_var = 0.0;
        if (count_ > 3) {
            var_of_var = (central_moment4() - (n - 3.0) / (n - 1.0) * s2 * s2) / n;
        }
        var_of_var = var_of_var > 0.0 ? var_of_var : 0.0;
        // Stored so that std_error reports the standard error of s² itself.
        return MCEstimate{s2, var_of_var * n, count_, std::sqrt(var_of_var)};
    }

private:
    std::int64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double m3_ = 0.0;
    double m4_ = 0.0;
};

/// Streaming covariance of paired samples.
class RunningCovariance {
public:
    void add(double x, double y) noexcept
    {
        ++count_;
        const double n = static_cast<double>(count_);
        const double dx = x - mean_x_;
        mean_x_ += dx / n;
        mean_y_ += (y - mean_y_) / n;
        c_ += dx * (y - mean_y_);
        x_.add(x);
        y_.add(y);
    }

    void merge(const RunningCovariance& other) noexcept
    {
        if (other.count_ == 0) {
            return;
        }
        if (count_ == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(count_);
        const double nb = static_cast<double>(other.count_);
        const double n = na + nb;
        const double dx = other.mean_x_ - mean_x_;
        const double dy = other.mean_y_ - mean_y_;
        c_ += other.c_ + dx * dy * na * nb / n;
        mean_x_ += dx * nb / n;
        mean_y_ += dy * nb / n;
        count_ += other.count_;
        x_.merge(other.x_);
        y_.merge(other.y_);
    }

    [[nodiscard]] std::int64_t count() const noexcept { return count_; }
    [[nodiscard]] double covariance() const noexcept
    {
        return count_ > 1 ? c_ / static_cast<double>(count_ - 1) : 0.0;
    }
    /// Standard error of the sample covariance under independence,
    /// sqrt(var_x var_y / n).
    [[nodiscard]] double covariance_std_error() const noexcept
    {
        return count_ > 0 ? std::sqrt(x_.variance() * y_.variance() / static_cast<double>(count_)) : 0.0;
    }
    [[nodiscard]] const RunningMoments& x() const noexcept { return x_; }
    [[nodiscard]] const RunningMoments& y() const noexcept { return y_; }

private:
    std::int64_t count_ = 0;
    double mean_x_ = 0.0;
    double mean_y_ = 0.0;
    double c_ = 0.0;
    RunningMoments x_;
    RunningMoments y_;
};

} // namespace fblrate
