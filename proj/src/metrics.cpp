#include "rmi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rmi {

namespace {

/// Calls f(prediction, position) for every key, with lower-bound positions for duplicates.
template<typename F>
void for_each_prediction(const Rmi &r, const KeySet &ks, F &&f) {
    if (ks.size() != r.n()) throw std::invalid_argument("metrics: key set differs from the indexed one");
    const auto keys = ks.keys();
    std::size_t position = 0;
    Prediction p{};
    for (std::size_t i = 0; i != keys.size(); ++i) {
        if (i == 0 || keys[i] != keys[i - 1]) {
            position = i;
            p = r.predict(keys[i]);
        }
        f(p, position);
    }
}

std::uint64_t abs_diff(std::size_t a, std::size_t b) noexcept { return a > b ? a - b : b - a; }

template<typename T>
double median_of(std::span<T> values) {
    if (values.empty()) throw std::invalid_argument("median of an empty sequence");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = static_cast<double>(values[mid]);
    if (values.size() % 2 == 1) return upper;
    const double lower = static_cast<double>(*std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid)));
    return (lower + upper) / 2.0;
}

} // namespace

SegmentStats segment_stats(std::span<const Segment> segments, std::size_t n) {
    if (segments.empty()) throw std::invalid_argument("segment_stats: no segments");
    SegmentStats stats;
    stats.n_segments = segments.size();
    std::size_t expected_begin = 0;
    std::size_t empty = 0;
    for (const Segment &s : segments) {
        if (s.begin != expected_begin || s.end < s.begin)
            throw std::invalid_argument("segment_stats: segments do not partition the key range");
        expected_begin = s.end;
        if (s.size() == 0) ++empty;
        stats.largest_segment = std::max(stats.largest_segment, s.size());
    }
    if (expected_begin != n) throw std::invalid_argument("segment_stats: segments do not cover all keys");
    stats.empty_fraction = static_cast<double>(empty) / static_cast<double>(segments.size());
    return stats;
}

std::vector<Segment> segments_of(const Rmi &r, const KeySet &ks) {
    return segment_boundaries(r.root(), ks.keys(), r.leaves().size());
}

double median_in_place(std::span<std::uint64_t> values) { return median_of(values); }
double median_in_place(std::span<double> values) { return median_of(values); }

double median_abs_error(const Rmi &r, const KeySet &ks) {
    std::vector<std::uint64_t> errors;
    errors.reserve(ks.size());
    for_each_prediction(r, ks, [&](const Prediction &p, std::size_t pos) { errors.push_back(abs_diff(p.est, pos)); });
    return median_in_place(errors);
}

double mean_log2_error(const Rmi &r, const KeySet &ks) {
    double sum = 0.0;
    for_each_prediction(r, ks, [&](const Prediction &p, std::size_t pos) {
        sum += std::log2(1.0 + static_cast<double>(abs_diff(p.est, pos)));
    });
    return sum / static_cast<double>(ks.size());
}

double median_interval_size(const Rmi &r, const KeySet &ks) {
    if (r.bounds().kind() == BoundKind::None) return static_cast<double>(r.n());
    std::vector<std::uint64_t> widths;
    widths.reserve(ks.size());
    for_each_prediction(r, ks, [&](const Prediction &p, std::size_t) { widths.push_back(p.hi - p.lo); });
    return median_in_place(widths);
}

ErrorStats error_stats(const Rmi &r, const KeySet &ks) {
    const bool bounded = r.bounds().kind() != BoundKind::None;
    std::vector<std::uint64_t> errors;
    std::vector<std::uint64_t> widths;
    errors.reserve(ks.size());
    if (bounded) widths.reserve(ks.size());
    double log_sum = 0.0;
    for_each_prediction(r, ks, [&](const Prediction &p, std::size_t pos) {
        const std::uint64_t e = abs_diff(p.est, pos);
        errors.push_back(e);
        log_sum += std::log2(1.0 + static_cast<double>(e));
        if (bounded) widths.push_back(p.hi - p.lo);
    });
    ErrorStats stats;
    stats.median_abs_error = median_in_place(errors);
    stats.mean_log2_error = log_sum / static_cast<double>(ks.size());
    stats.median_interval_size = bounded ? median_in_place(widths) : static_cast<double>(r.n());
    return stats;
}

} // namespace rmi
