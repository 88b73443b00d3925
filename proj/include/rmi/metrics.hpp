#pragma once

#include "rmi/keyset.hpp"
#include "rmi/rmi.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rmi {

/// Occupancy of the segments a root model induces.
struct SegmentStats {
    std::size_t n_segments = 0;
    double empty_fraction = 0.0;     ///< segments without keys / n_segments
    std::size_t largest_segment = 0; ///< key count of the fullest segment
};

/// Throws std::invalid_argument unless @p segments partition [0, n) in order.
SegmentStats segment_stats(std::span<const Segment> segments, std::size_t n);

/// Segments of @p r's root over the keys it was trained on.
std::vector<Segment> segments_of(const Rmi &r, const KeySet &ks);

/// Prediction-error summary over every key of the indexed data.
struct ErrorStats {
    double median_abs_error = 0.0;
    double mean_log2_error = 0.0;      ///< mean of log2(1 + |est - position|)
    double median_interval_size = 0.0; ///< median of hi - lo; n without bounds
};

/// Median of @p values (mean of the middle pair for even counts). Reorders the input.
double median_in_place(std::span<std::uint64_t> values);
double median_in_place(std::span<double> values);

/// Median over all keys of |est(x) - lower_bound(x)|.
double median_abs_error(const Rmi &r, const KeySet &ks);

/**
 * Mean over all keys of log2(1 + |est(x) - lower_bound(x)|). A zero error counts as zero search
 * steps. Terms are summed in key order, so the result does not depend on evaluation order.
 */
double mean_log2_error(const Rmi &r, const KeySet &ks);

/// Median over all keys of the search interval width hi - lo.
double median_interval_size(const Rmi &r, const KeySet &ks);

/// All three statistics from a single evaluation pass.
ErrorStats error_stats(const Rmi &r, const KeySet &ks);

} // namespace rmi
