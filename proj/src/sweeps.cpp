#include "fblrate/sweeps.hpp"

#include "fblrate/error.hpp"
#include "fblrate/output.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace fblrate {

void SweepTable::add_column(SweepColumn column)
{
    if (column.values.size() != axis_values.size()) {
        throw DimensionError("sweep column '" + column.label + "' has " + std::to_string(column.values.size()) +
                             " values for an axis of " + std::to_string(axis_values.size()));
    }
    columns.push_back(std::move(column));
}

std::string AntennaConfig::label() const
{
    return "nt" + std::to_string(n_t) + "_nr" + std::to_string(n_r);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear)
{
    if (!(linear > 0.0)) {
        throw DomainError("linear_to_db needs a positive value");
    }
    return 10.0 * std::log10(linear);
}

namespace {

std::optional<double> na_total(double n, Probability eps, double rho, int n_t, int n_r, int T)
{
    const Scenario s{n_t, n_r, T, n / T, rho, eps};
    if (!s.valid()) {
        return std::nullopt;
    }
    return na_noncoherent(s).total;
}

} // namespace

SweepTable rate_vs_T(double n, Probability eps, double rho, const std::vector<AntennaConfig>& configs,
                     const std::vector<int>& T_values)
{
    if (!(n > 0.0)) {
        throw ValidityError("n > 0 violated");
    }
    SweepTable table;
    table.axis_name = "T";
    table.value_name = "rate_nats_per_cu";
    table.axis_values.assign(T_values.begin(), T_values.end());
    table.metadata = {{"n", format_double(n)}, {"eps", format_double(eps.value())}, {"rho", format_double(rho)},
                      {"units", "nats per channel use"}};

    for (const auto& cfg : configs) {
        SweepColumn column{cfg.label(), std::vector<std::optional<double>>(T_values.size())};
        const auto count = static_cast<std::int64_t>(T_values.size());
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < count; ++i) {
            column.values[static_cast<std::size_t>(i)] = na_total(n, eps, rho, cfg.n_t, cfg.n_r, T_values[i]);
        }
        table.add_column(std::move(column));
    }
    return table;
}

std::vector<int> CrossingReport::upward() const
{
    std::vector<int> out;
    for (const auto& c : crossings) {
        if (c.upward) {
            out.push_back(c.T);
        }
    }
    return out;
}

std::vector<CrossingReport> crossing_points(double n, Probability eps, double rho, int n_r,
                                            const std::vector<int>& nt_list, int T_max)
{
    std::set<int> seen;
    for (int nt : nt_list) {
        if (nt < 1 || nt > n_r) {
            throw ValidityError("transmit antenna count " + std::to_string(nt) + " outside [1, n_r=" +
                                std::to_string(n_r) + "]");
        }
        if (!seen.insert(nt).second) {
            throw ValidityError("transmit antenna count " + std::to_string(nt) + " listed twice");
        }
    }
    const std::vector<int> sorted(seen.begin(), seen.end());

    std::vector<CrossingReport> reports;
    for (std::size_t a = 0; a < sorted.size(); ++a) {
        for (std::size_t b = a + 1; b < sorted.size(); ++b) {
            CrossingReport report{sorted[a], sorted[b], {}};
            const int start = report.n2 + n_r;
            bool have_previous = false;
            double previous = 0.0;
            for (int T = start; T <= T_max; ++T) {
                const auto hi = na_total(n, eps, rho, report.n2, n_r, T);
                const auto lo = na_total(n, eps, rho, report.n1, n_r, T);
                if (!hi || !lo) {
                    have_previous = false;
                    continue;
                }
                const double diff = *hi - *lo;
                if (have_previous) {
                    if (previous < 0.0 && diff >= 0.0) {
                        report.crossings.push_back({T, true});
                    } else if (previous >= 0.0 && diff < 0.0) {
                        report.crossings.push_back({T, false});
                    }
                }
                previous = diff;
                have_previous = true;
            }
            reports.push_back(std::move(report));
        }
    }
    return reports;
}

int optimal_nt(int T, double n, Probability eps, double rho, int n_r, const std::vector<int>& candidates)
{
    int best = 0;
    double best_rate = -INFINITY;
    std::vector<int> sorted = candidates;
    std::sort(sorted.begin(), sorted.end());
    for (int nt : sorted) {
        const auto rate = na_total(n, eps, rho, nt, n_r, T);
        if (rate && *rate > best_rate) {
            best = nt;
            best_rate = *rate;
        }
    }
    if (best == 0) {
        throw ValidityError("no valid n_t: need T ≥ n_t + n_r and n_t ≤ n_r (T=" + std::to_string(T) +
                            ", n_r=" + std::to_string(n_r) + ")");
    }
    return best;
}

int optimal_nt(int T, double n, Probability eps, double rho, int n_r)
{
    std::vector<int> candidates;
    for (int nt = 1; nt <= std::min(n_r, T - n_r); ++nt) {
        candidates.push_back(nt);
    }
    return optimal_nt(T, n, eps, rho, n_r, candidates);
}

std::string SnrSweepConfig::label() const
{
    switch (channel) {
    case ChannelKind::awgn:
        return "awgn_" + antennas.label();
    case ChannelKind::coherent:
        return "coherent_" + antennas.label();
    case ChannelKind::noncoherent:
        break;
    }
    return "noncoherent_" + antennas.label();
}

SweepTable err_vs_snr(double rate_nats, int T, double L, const std::vector<double>& snr_db,
                      const std::vector<SnrSweepConfig>& configs, const SamplingPlan& coherent_plan)
{
    if (!(rate_nats >= 0.0)) {
        throw ValidityError("R ≥ 0 violated");
    }
    if (!(L > 0.0)) {
        throw ValidityError("L > 0 violated");
    }
    if (T < 1) {
        throw ValidityError("T ≥ 1 violated");
    }
    const double n = L * T;
    const double k_bits = rate_nats * n / std::numbers::ln2;

    SweepTable table;
    table.axis_name = "snr_db";
    table.value_name = "eps";
    table.axis_values = snr_db;
    table.metadata = {{"rate_nats_per_cu", format_double(rate_nats)}, {"T", std::to_string(T)},
                      {"L", format_double(L)}};

    for (const auto& cfg : configs) {
        SweepColumn column{cfg.label(), {}};
        const int nt = cfg.antennas.n_t;
        const int nr = cfg.antennas.n_r;
        for (double db : snr_db) {
            const double rho = db_to_linear(db);
            std::optional<double> value;
            switch (cfg.channel) {
            case ChannelKind::noncoherent:
                if (!dimension_violation(T, nt, nr)) {
                    value = eps_noncoherent(k_bits, n, T, rho, nt, nr).value();
                }
                break;
            case ChannelKind::awgn:
                value = eps_awgn(k_bits, n, rho, nt, nr).value();
                break;
            case ChannelKind::coherent:
                value = eps_coherent(k_bits, n, T, rho, nt, nr, coherent_plan).value();
                break;
            }
            column.values.push_back(value);
        }
        table.add_column(std::move(column));
    }
    return table;
}

} // namespace fblrate
