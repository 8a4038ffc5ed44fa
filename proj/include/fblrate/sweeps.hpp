#pragma once

// Grid evaluations of the normal approximations: rate against the coherence
// interval at fixed blocklength, error probability against SNR, crossing
// points between antenna configurations and the best number of transmit
// antennas.

#include "fblrate/normapprox.hpp"
#include "fblrate/parallel.hpp"
#include "fblrate/specfun.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fblrate {

struct SweepColumn {
    std::string label;
    std::vector<std::optional<double>> values; // nullopt marks a point outside the validity region
};

struct SweepTable {
    std::string axis_name;
    std::string value_name;
    std::vector<double> axis_values;
    std::vector<SweepColumn> columns;
    std::map<std::string, std::string> metadata;

    /// Throws DimensionError when the column length differs from the axis.
    void add_column(SweepColumn column);
    [[nodiscard]] std::size_t rows() const noexcept { return axis_values.size(); }
};

struct AntennaConfig {
    int n_t = 1;
    int n_r = 1;
    [[nodiscard]] std::string label() const;
};

/// na_noncoherent totals with L = n/T, one column per configuration.
SweepTable rate_vs_T(double n, Probability eps, double rho, const std::vector<AntennaConfig>& configs,
                     const std::vector<int>& T_values);

struct Crossing {
    int T = 0;
    bool upward = true; // NA(n2) − NA(n1) goes from < 0 at T − 1 to ≥ 0 at T
};

struct CrossingReport {
    int n1 = 0;
    int n2 = 0;
    std::vector<Crossing> crossings;

    [[nodiscard]] std::vector<int> upward() const;
};

inline constexpr int kDefaultCrossingTMax = 256;

/// Sign changes of NA(n2, T) − NA(n1, T) on the integer grid from
/// max(n1, n2) + n_r up to T_max, for every pair n1 < n2 of nt_list.
std::vector<CrossingReport> crossing_points(double n, Probability eps, double rho, int n_r,
                                            const std::vector<int>& nt_list, int T_max = kDefaultCrossingTMax);

/// argmax of na_noncoherent over n_t ∈ [1, min(n_r, T − n_r)], ties to the smaller n_t.
int optimal_nt(int T, double n, Probability eps, double rho, int n_r);
/// The same restricted to the given candidates; invalid candidates are skipped.
int optimal_nt(int T, double n, Probability eps, double rho, int n_r, const std::vector<int>& candidates);

struct SnrSweepConfig {
    AntennaConfig antennas;
    ChannelKind channel = ChannelKind::noncoherent;
    [[nodiscard]] std::string label() const;
};

/// Error probability at rate R (nats per channel use) with k ln 2 = R·L·T
/// over a grid of SNR values in dB.
SweepTable err_vs_snr(double rate_nats, int T, double L, const std::vector<double>& snr_db,
                      const std::vector<SnrSweepConfig>& configs, const SamplingPlan& coherent_plan = {});

double db_to_linear(double db);
double linear_to_db(double linear);

} // namespace fblrate
