#pragma once

#include "rmi/keyset.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace rmi {

/// Error-correction search algorithms.
enum class SearchAlgorithm : std::uint8_t {
    Binary = 0,                 ///< Bin: binary search over the bounded interval
    ModelBiasedBinary = 1,      ///< MBin: first probe at the estimate, then halving
    ModelBiasedLinear = 2,      ///< MLin: step by one from the estimate
    ModelBiasedExponential = 3, ///< MExp: doubling steps from the estimate, then binary search
};

std::string_view to_string(SearchAlgorithm algorithm);
/// Accepts Bin, MBin, MLin, MExp (case-insensitive). Throws std::invalid_argument otherwise.
SearchAlgorithm parse_search_algorithm(std::string_view text);

struct SearchSpec {
    SearchAlgorithm algorithm;
    bool requires_bounds;
};

/// Bin and MBin search inside error bounds; MLin and MExp only need the position estimate.
constexpr bool requires_bounds(SearchAlgorithm algorithm) noexcept {
    return algorithm == SearchAlgorithm::Binary || algorithm == SearchAlgorithm::ModelBiasedBinary;
}

constexpr SearchSpec search_spec(SearchAlgorithm algorithm) noexcept { return {algorithm, requires_bounds(algorithm)}; }

/// Probe counter that compiles away.
struct NoProbeCount {
    constexpr void operator()() const noexcept { }
};

/// Counts key comparisons; pass by reference to any search function.
struct ProbeCount {
    std::size_t probes = 0;
    std::size_t probes_before_bracket = 0; ///< MExp only: comparisons spent finding the bracket
    void operator()() noexcept { ++probes; }
    void bracket_found() noexcept { probes_before_bracket = probes; }
};

namespace detail {

template<typename Counter>
std::size_t counted_lower_bound(std::span<const Key> keys, Key q, std::size_t lo, std::size_t hi, Counter &count) {
    const auto first = keys.begin() + static_cast<std::ptrdiff_t>(lo);
    const auto last = keys.begin() + static_cast<std::ptrdiff_t>(hi);
    const auto it = std::lower_bound(first, last, q, [&count](Key element, Key value) {
        count();
        return element < value;
    });
    return static_cast<std::size_t>(it - keys.begin());
}

template<typename Counter>
void notify_bracket(Counter &count) {
    if constexpr (requires { count.bracket_found(); }) count.bracket_found();
}

} // namespace detail

/**
 * Lower-bound position of @p q within [lo, hi): the first position in the window whose key is
 * not less than @p q, or @p hi. Never reads outside the window.
 */
template<typename Counter = NoProbeCount>
std::size_t binary_search(std::span<const Key> keys, Key q, std::size_t lo, std::size_t hi, Counter &&count = {}) {
    return detail::counted_lower_bound(keys, q, lo, hi, count);
}

/**
 * Same contract as binary_search, but the first probe is @p est (moved inside the window if
 * needed). Later probes halve the surviving sub-interval.
 */
template<typename Counter = NoProbeCount>
std::size_t model_biased_binary(std::span<const Key> keys, Key q, std::size_t lo, std::size_t hi, std::size_t est,
                                Counter &&count = {}) {
    if (lo >= hi) return lo;
    est = std::clamp(est, lo, hi - 1);
    count();
    if (keys[est] < q) {
        lo = est + 1;
    } else {
        hi = est;
    }
    return detail::counted_lower_bound(keys, q, lo, hi, count);
}

/**
 * Lower-bound position of @p q in the whole array, stepping one position at a time from
 * @p est towards the answer. Reads only inside [0, n).
 */
template<typename Counter = NoProbeCount>
std::size_t model_biased_linear(std::span<const Key> keys, Key q, std::size_t est, Counter &&count = {}) {
    const std::size_t n = keys.size();
    if (n == 0) return 0;
    std::size_t pos = std::min(est, n - 1);
    count();
    if (keys[pos] < q) {
        ++pos;
        while (pos < n) {
            count();
            if (!(keys[pos] < q)) break;
            ++pos;
        }
        return pos;
    }
    while (pos > 0) {
        count();
        if (keys[pos - 1] < q) break;
        --pos;
    }
    return pos;
}

/**
 * Lower-bound position of @p q in the whole array. Probes est +/- 1, 2, 4, ... in the direction
 * indicated by keys[est] until the answer is bracketed (or an array end is reached), then
 * binary-searches the bracket. Reads only inside [0, n).
 */
template<typename Counter = NoProbeCount>
std::size_t model_biased_exponential(std::span<const Key> keys, Key q, std::size_t est, Counter &&count = {}) {
    const std::size_t n = keys.size();
    if (n == 0) return 0;
    est = std::min(est, n - 1);
    count();
    if (keys[est] < q) {
        // Answer lies in (est, n]; find a step with keys[est + step] >= q.
        std::size_t step = 1;
        while (step < n - est) {
            count();
            if (!(keys[est + step] < q)) break;
            step *= 2;
        }
        const std::size_t lo = est + step / 2 + 1;
        const std::size_t hi = std::min(est + step, n);
        detail::notify_bracket(count);
        return detail::counted_lower_bound(keys, q, lo, hi, count);
    }
    // Answer lies in [0, est]; find a step with keys[est - step] < q.
    std::size_t step = 1;
    while (step <= est) {
        count();
        if (keys[est - step] < q) break;
        step *= 2;
    }
    const std::size_t lo = step <= est ? est - step + 1 : 0;
    const std::size_t hi = est - step / 2;
    detail::notify_bracket(count);
    return detail::counted_lower_bound(keys, q, lo, hi, count);
}

} // namespace rmi
