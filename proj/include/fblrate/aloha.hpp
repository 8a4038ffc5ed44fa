#pragma once

// Slotted-ALOHA planning with short packets: d devices share a frame of n
// channel uses split into s slots; a packet succeeds when its slot has no
// collision and decoding succeeds.

#include "fblrate/normapprox.hpp"
#include "fblrate/parallel.hpp"
#include "fblrate/specfun.hpp"

namespace fblrate {

enum class PayloadMode {
    continuous, // largest real k meeting the threshold
    integer     // largest whole number of bits
};

struct AlohaScenario {
    int devices = 12;
    double n = 480.0;
    double rho = 316.22776601683796; // 25 dB
    ChannelKind channel = ChannelKind::awgn;
    int n_t = 1;
    int n_r = 1;
    int T = 96;
    Probability success_threshold{0.3};
    PayloadMode payload = PayloadMode::continuous;
    /// Monte Carlo plan for the coherent moments; fixed seed keeps optimize deterministic.
    SamplingPlan coherent_plan{100'000, RngStream{0x5eed, 0}};
};

struct AlohaPlan {
    int s_star = 0;
    double k_star = 0.0;
    Probability eps_star{};
    Probability p_success{};
};

/// (d/s)(1 − 1/s)^{d−1}, the probability that a given packet is alone in its slot.
double collision_free_probability(int s, int devices);

/// Decoding error ε*(k, n_s, ρ) for the scenario's channel.
Probability packet_error(double k_bits, double n_s, const AlohaScenario& sc);

/// P_s = (d/s)(1 − 1/s)^{d−1}(1 − ε*(k, n/s, ρ)).
Probability p_success(int s, double k_bits, const AlohaScenario& sc);

/// Largest payload with ε*(k, n_s) ≤ target; negative when even k = 0 misses it.
double max_payload_bits(double n_s, double target_eps, const AlohaScenario& sc);

/// Exhaustive search over s ∈ [1, ⌊n⌋] maximizing k subject to P_s ≥ threshold.
/// Ties in k go to the larger P_s, then the smaller s. Throws InfeasibleError.
AlohaPlan optimize(const AlohaScenario& sc);

/// The slot count maximizing the collision-free probability and that probability.
std::pair<int, double> collision_only_optimum(int devices, int max_slots);

} // namespace fblrate
