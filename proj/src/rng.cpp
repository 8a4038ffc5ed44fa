#include "fblrate/rng.hpp"

#include "fblrate/error.hpp"

namespace fblrate {

RngStream RngStream::substream(std::uint64_t index) const noexcept
{
    return RngStream{mix64(seed ^ mix64(stream_index)), index};
}

RandomSource::RandomSource(RngStream stream)
{
    // Two rounds of mixing keep (s, i) and (i, s) apart.
    std::seed_seq seq{
        static_cast<std::uint32_t>(mix64(stream.seed)),
        static_cast<std::uint32_t>(mix64(stream.seed) >> 32),
        static_cast<std::uint32_t>(mix64(stream.stream_index ^ 0x5bd1e995ULL)),
        static_cast<std::uint32_t>(mix64(stream.stream_index ^ 0x5bd1e995ULL) >> 32),
    };
    engine_.seed(seq);
}

double RandomSource::gamma(double shape)
{
    if (!(shape > 0.0)) {
        throw DomainError("gamma draw needs a positive shape");
    }
    std::gamma_distribution<double> dist(shape, 1.0);
    return dist(engine_);
}

} // namespace fblrate
