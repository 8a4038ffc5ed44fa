#pragma once

// Chunked Monte Carlo driver.
//
// The sample range is cut into fixed-size chunks; chunk c draws from
// RngStream substream c and accumulates into its own accumulator. Partial
// results are merged in chunk order, so the serial and OpenMP kernels return
// bit-identical results for any worker count.

#include "fblrate/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fblrate {

enum class Execution { serial, parallel };

struct SamplingPlan {
    std::int64_t samples = 100'000;
    RngStream stream{};
    /// OpenMP thread count; 0 uses the runtime default.
    int workers = 0;
    Execution execution = Execution::parallel;
};

inline constexpr std::int64_t kChunkSize = 4096;

inline std::int64_t chunk_count(std::int64_t samples)
{
    return (samples + kChunkSize - 1) / kChunkSize;
}

namespace detail {

template <class Acc, class Kernel>
void run_chunk(const SamplingPlan& plan, std::int64_t chunk, Acc& acc, Kernel& kernel)
{
    RandomSource source(plan.stream.substream(static_cast<std::uint64_t>(chunk)));
    const std::int64_t begin = chunk * kChunkSize;
    const std::int64_t end = std::min(plan.samples, begin + kChunkSize);
    for (std::int64_t i = begin; i < end; ++i) {
        kernel(source, acc);
    }
}

inline void check_samples(std::int64_t samples)
{
    if (samples < 1) {
        throw std::invalid_argument("sample count must be >= 1");
    }
}

} // namespace detail

/// Serial reference: runs every chunk in order on the calling thread.
/// Kernel is void(RandomSource&, Acc&); Acc needs merge(const Acc&).
template <class Acc, class Kernel>
Acc accumulate_serial(const SamplingPlan& plan, Kernel kernel)
{
    detail::check_samples(plan.samples);
    const std::int64_t chunks = chunk_count(plan.samples);
    Acc total{};
    for (std::int64_t c = 0; c < chunks; ++c) {
        Acc part{};
        detail::run_chunk(plan, c, part, kernel);
        total.merge(part);
    }
    return total;
}

/// OpenMP kernel: chunks run concurrently, merge order is fixed.
template <class Acc, class Kernel>
Acc accumulate_parallel(const SamplingPlan& plan, Kernel kernel)
{
    detail::check_samples(plan.samples);
    const std::int64_t chunks = chunk_count(plan.samples);
    std::vector<Acc> parts(static_cast<std::size_t>(chunks));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chunks));

#ifdef _OPENMP
    const int threads = plan.workers > 0 ? plan.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) firstprivate(kernel)
#endif
    for (std::int64_t c = 0; c < chunks; ++c) {
        try {
            detail::run_chunk(plan, c, parts[static_cast<std::size_t>(c)], kernel);
        } catch (...) {
            errors[static_cast<std::size_t>(c)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    Acc total{};
    for (const auto& part : parts) {
        total.merge(part);
    }
    return total;
}

template <class Acc, class Kernel>
Acc accumulate(const SamplingPlan& plan, Kernel kernel)
{
    return plan.execution == Execution::serial ? accumulate_serial<Acc>(plan, std::move(kernel))
                                               : accumulate_parallel<Acc>(plan, std::move(kernel));
}

namespace detail {

// Collects raw draws; chunk-local buffers concatenated in chunk order.
struct SampleBuffer {
    std::vector<double> values;
    void merge(const SampleBuffer& other)
    {
        values.insert(values.end(), other.values.begin(), other.values.end());
    }
};

} // namespace detail

/// All draws of a scalar sampler, in a reproducible order.
/// Draw is double(RandomSource&).
template <class Draw>
std::vector<double> collect_samples(const SamplingPlan& plan, Draw draw)
{
    auto kernel = [draw](RandomSource& source, detail::SampleBuffer& buffer) mutable {
        buffer.values.push_back(draw(source));
    };
    return accumulate<detail::SampleBuffer>(plan, kernel).values;
}

} // namespace fblrate
