#include "fblrate/aloha.hpp"

#include "fblrate/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace fblrate {

namespace {

// ε*(k, n) = Q((nC − k ln 2 + c) / sqrt(nV)) for every supported channel.
struct NormalParams {
    double capacity;
    double variance;
    double correction;
};

NormalParams normal_params(double n_s, const AlohaScenario& sc)
{
    switch (sc.channel) {
    case ChannelKind::awgn:
        return {c_awgn(sc.rho, sc.n_t, sc.n_r), v_awgn(sc.rho, sc.n_t, sc.n_r), 0.5 * std::log(n_s)};
    case ChannelKind::coherent: {
        const auto m = coherent_moments(sc.T, sc.rho, sc.n_t, sc.n_r, sc.coherent_plan);
        return {m.capacity.mean, m.dispersion.mean, 0.0};
    }
    case ChannelKind::noncoherent:
        return {i_tilde(sc.T, sc.rho, sc.n_t, sc.n_r), sc.T * v_tilde(sc.T, sc.n_t, sc.n_r), 0.0};
    }
    throw DomainError("unknown channel kind");
}

void require_scenario(const AlohaScenario& sc)
{
    if (sc.devices < 1) {
        throw ValidityError("d ≥ 1 violated");
    }
    if (!(sc.n >= 1.0) || !std::isfinite(sc.n)) {
        throw ValidityError("n ≥ 1 violated");
    }
    if (!(sc.rho > 0.0)) {
        throw ValidityError("ρ > 0 violated");
    }
    if (sc.channel == ChannelKind::noncoherent) {
        if (auto v = dimension_violation(sc.T, sc.n_t, sc.n_r)) {
            throw ValidityError(*v);
        }
    }
    if (sc.n_t < 1 || sc.n_r < 1 || sc.T < 1) {
        throw ValidityError("n_t, n_r, T ≥ 1 violated");
    }
}

} // namespace

double collision_free_probability(int s, int devices)
{
    if (s < 1 || devices < 1) {
        throw DomainError("collision_free_probability needs s >= 1 and d >= 1");
    }
    const double ds = devices;
    return ds / s * std::pow(1.0 - 1.0 / s, ds - 1.0);
}

Probability packet_error(double k_bits, double n_s, const AlohaScenario& sc)
{
    switch (sc.channel) {
    case ChannelKind::awgn:
        return eps_awgn(k_bits, n_s, sc.rho, sc.n_t, sc.n_r);
    case ChannelKind::coherent:
        return eps_coherent(k_bits, n_s, sc.T, sc.rho, sc.n_t, sc.n_r, sc.coherent_plan);
    case ChannelKind::noncoherent:
        return eps_noncoherent(k_bits, n_s, sc.T, sc.rho, sc.n_t, sc.n_r);
    }
    throw DomainError("unknown channel kind");
}

Probability p_success(int s, double k_bits, const AlohaScenario& sc)
{
    require_scenario(sc);
    if (s < 1 || s > sc.n) {
        throw ValidityError("1 ≤ s ≤ n violated (s=" + std::to_string(s) + ")");
    }
    if (!(k_bits >= 0.0)) {
        throw ValidityError("k ≥ 0 violated");
    }
    const double eps = packet_error(k_bits, sc.n / s, sc).value();
    return Probability(collision_free_probability(s, sc.devices) * (1.0 - eps));
}

double max_payload_bits(double n_s, double target_eps, const AlohaScenario& sc)
{
    if (!(target_eps > 0.0)) {
        return -1.0;
    }
    if (target_eps >= 1.0) {
        return INFINITY;
    }
    const auto p = normal_params(n_s, sc);
    return (n_s * p.capacity + p.correction - std::sqrt(n_s * p.variance) * q_inverse(target_eps)) /
           std::numbers::ln2;
}

AlohaPlan optimize(const AlohaScenario& sc)
{
    require_scenario(sc);
    const double threshold = sc.success_threshold.value();
    const int max_slots = static_cast<int>(std::floor(sc.n));

    bool found = false;
    AlohaPlan best;
    for (int s = 1; s <= max_slots; ++s) {
        const double collision = collision_free_probability(s, sc.devices);
        if (collision < threshold || collision <= 0.0) {
            continue;
        }
        const double n_s = sc.n / s;
        const double target = 1.0 - threshold / collision;
        double k = max_payload_bits(n_s, target, sc);
        if (!(k >= 0.0) || !std::isfinite(k)) {
            continue;
        }
        if (sc.payload == PayloadMode::integer) {
            k = std::floor(k);
            while (k >= 0.0 && p_success(s, k, sc).value() < threshold) {
                k -= 1.0;
            }
            if (k < 0.0) {
                continue;
            }
        }
        const double eps = packet_error(k, n_s, sc).value();
        const double ps = collision * (1.0 - eps);
        const bool better = !found || k > best.k_star || (k == best.k_star && ps > best.p_success.value());
        if (better) {
            found = true;
            best = AlohaPlan{s, k, Probability(eps), Probability(std::min(1.0, ps))};
        }
    }
    if (!found) {
        std::ostringstream msg;
        msg << "no slot count reaches P_s ≥ " << threshold << " (best collision-free probability "
            << collision_only_optimum(sc.devices, max_slots).second << ")";
        throw InfeasibleError(msg.str());
    }
    return best;
}

std::pair<int, double> collision_only_optimum(int devices, int max_slots)
{
    if (max_slots < 1) {
        throw DomainError("collision_only_optimum needs at least one slot");
    }
    std::pair<int, double> best{1, collision_free_probability(1, devices)};
    for (int s = 2; s <= max_slots; ++s) {
        const double p = collision_free_probability(s, devices);
        if (p > best.second) {
            best = {s, p};
        }
    }
    return best;
}

} // namespace fblrate
