#pragma once

#include "rmi/keyset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string_view>
#include <variant>

namespace rmi {

/// Model families usable in an index. LR and LS both produce a LinearModel.
enum class ModelType : std::uint8_t {
    LinearRegression = 0, ///< LR: least-squares line
    LinearSpline = 1,     ///< LS: line through the first and last point
    CubicSpline = 2,      ///< CS: monotone cubic through the first and last point
    Radix = 3,            ///< RX: drop the common prefix, keep the top bits
};

std::string_view to_string(ModelType type);
/// Accepts the abbreviations LR, LS, CS, RX (case-insensitive). Throws std::invalid_argument otherwise.
ModelType parse_model_type(std::string_view text);

/// f(x) = slope * x + intercept
struct LinearModel {
    double slope = 0.0;
    double intercept = 0.0;

    double operator()(Key x) const noexcept { return slope * static_cast<double>(x) + intercept; }
    friend bool operator==(const LinearModel &, const LinearModel &) = default;
};

/**
 * f(x) = a*s^3 + b*s^2 + c*s + d with s = x - origin.
 *
 * Evaluating relative to the first training key keeps the polynomial well conditioned when the
 * key range is narrow compared to the key magnitude. With origin = 0 this is the plain power basis.
 */
struct CubicModel {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    Key origin = 0;

    double operator()(Key x) const noexcept {
        const double s = x >= origin ? static_cast<double>(x - origin) : -static_cast<double>(origin - x);
        return ((a * s + b) * s + c) * s + d;
    }
    friend bool operator==(const CubicModel &, const CubicModel &) = default;
};

/// f(x) = (x << left_shift) >> right_shift; a shift of 64 clears every bit.
struct RadixModel {
    std::uint8_t left_shift = 0;
    std::uint8_t right_shift = 0;

    Key bits(Key x) const noexcept {
        const Key shifted = left_shift >= 64 ? 0 : x << left_shift;
        return right_shift >= 64 ? 0 : shifted >> right_shift;
    }
    double operator()(Key x) const noexcept { return static_cast<double>(bits(x)); }
    friend bool operator==(const RadixModel &, const RadixModel &) = default;
};

using Model = std::variant<LinearModel, CubicModel, RadixModel>;

inline double eval_model(const Model &m, Key x) {
    return std::visit([x](const auto &model) { return model(x); }, m);
}

/// Logical parameter payload in bytes: LinearModel 16, CubicModel 40, RadixModel 2.
std::size_t model_bytes(ModelType type);

/// One training point: a key and the value the model should predict for it.
struct TrainingPair {
    Key key;
    double target;
    friend bool operator==(const TrainingPair &, const TrainingPair &) = default;
};

/**
 * Random-access sequence of training pairs sorted by key. Satisfied by containers and spans of
 * TrainingPair and by PositionPairs, which derives pairs from a key range without copying.
 */
template<typename R>
concept TrainingPairs = requires(const R &r, std::size_t i) {
    { r.size() } -> std::convertible_to<std::size_t>;
    { r[i] } -> std::convertible_to<TrainingPair>;
};

/**
 * Pairs (keys[i], (offset + lower_bound position of keys[i]) * scale) over a contiguous run of a
 * sorted key array. The run must not split a run of duplicate keys, which holds for every segment
 * produced by a monotone root.
 */
class PositionPairs
{
    std::span<const Key> keys_;
    std::size_t offset_;
    double scale_;

    public:
    PositionPairs(std::span<const Key> keys, std::size_t offset, double scale = 1.0) noexcept
        : keys_(keys), offset_(offset), scale_(scale) { }

    std::size_t size() const noexcept { return keys_.size(); }

    TrainingPair operator[](std::size_t i) const noexcept {
        const Key key = keys_[i];
        const auto first = static_cast<std::size_t>(std::lower_bound(keys_.begin(), keys_.begin() + i, key) - keys_.begin());
        return {key, static_cast<double>(offset_ + first) * scale_};
    }

    /// Visits every pair in key order in a single pass.
    template<typename F>
    void for_each(F &&f) const {
        std::size_t first = 0;
        for (std::size_t i = 0; i != keys_.size(); ++i) {
            if (i == 0 || keys_[i] != keys_[i - 1]) first = i;
            f(TrainingPair{keys_[i], static_cast<double>(offset_ + first) * scale_});
        }
    }
};

template<TrainingPairs R, typename F>
void for_each_pair(const R &pairs, F &&f) {
    if constexpr (requires { pairs.for_each(f); }) {
        pairs.for_each(f);
    } else {
        for (std::size_t i = 0; i != static_cast<std::size_t>(pairs.size()); ++i) f(TrainingPair(pairs[i]));
    }
}

namespace detail {

/// Slope between two pairs; @p fallback when the keys coincide.
inline double secant(const TrainingPair &p, const TrainingPair &q, double fallback) noexcept {
    if (q.key == p.key) return fallback;
    return (q.target - p.target) / static_cast<double>(q.key - p.key);
}

} // namespace detail

/**
 * Ordinary least squares fit. Keys are centred on the first key and accumulated with running
 * (Welford-style) means so 64-bit keys do not lose precision in the moment sums.
 * Zero pairs give (0, 0); one pair, identical keys, or a negative fitted slope give the constant
 * model at the mean target.
 */
template<TrainingPairs R>
LinearModel train_linear_regression(const R &pairs) {
    const std::size_t n = pairs.size();
    if (n == 0) return {};
    const Key origin = TrainingPair(pairs[0]).key;

    double count = 0.0;
    double mean_x = 0.0;
    double mean_y = 0.0;
    double co_moment = 0.0;
    double x_moment = 0.0;
    for_each_pair(pairs, [&](const TrainingPair &p) {
        const double dx = static_cast<double>(p.key - origin);
        count += 1.0;
        const double delta_x = dx - mean_x;
        mean_x += delta_x / count;
        mean_y += (p.target - mean_y) / count;
        co_moment += delta_x * (p.target - mean_y);
        x_moment += delta_x * (dx - mean_x);
    });

    if (x_moment <= 0.0) return {0.0, mean_y};
    const double slope = co_moment / x_moment;
    if (!(slope >= 0.0) || !std::isfinite(slope)) return {0.0, mean_y};
    return {slope, mean_y - slope * mean_x - slope * static_cast<double>(origin)};
}

/// Line through the first and last pair. Equal endpoint keys give the constant first target.
template<TrainingPairs R>
LinearModel train_linear_spline(const R &pairs) {
    const std::size_t n = pairs.size();
    if (n == 0) return {};
    const TrainingPair first = pairs[0];
    const TrainingPair last = pairs[n - 1];
    if (last.key == first.key || !(last.target > first.target)) return {0.0, first.target};
    const double slope = (last.target - first.target) / static_cast<double>(last.key - first.key);
    return {slope, first.target - slope * static_cast<double>(first.key)};
}

/**
 * Monotone cubic Hermite segment through the first and last pair.
 *
 * Endpoint derivatives start as the secants to the second and second-to-last pair and are
 * limited with the Fritsch-Carlson criterion. Fewer than four pairs, and the rare case where
 * floating-point evaluation is not non-decreasing over the training keys, fall back to the
 * linear spline (a = b = 0).
 */
template<TrainingPairs R>
CubicModel train_cubic_spline(const R &pairs) {
    const std::size_t n = pairs.size();
    if (n == 0) return {};
    const TrainingPair first = pairs[0];
    const TrainingPair last = pairs[n - 1];
    const LinearModel line = train_linear_spline(pairs);
    const CubicModel fallback{0.0, 0.0, line.slope, first.target, first.key};
    if (n < 4 || last.key == first.key || !(last.target > first.target)) return fallback;

    const double width = static_cast<double>(last.key - first.key);
    const double rise = last.target - first.target;
    const double overall = rise / width;
    double alpha = detail::secant(first, pairs[1], overall) / overall;
    double beta = detail::secant(pairs[n - 2], last, overall) / overall;
    alpha = std::max(alpha, 0.0);
    beta = std::max(beta, 0.0);
    const double radius_sq = alpha * alpha + beta * beta;
    if (radius_sq > 9.0) {
        const double tau = 3.0 / std::sqrt(radius_sq);
        alpha *= tau;
        beta *= tau;
    }
    const double m0 = alpha * overall;
    const double m1 = beta * overall;

    // Hermite basis expanded to powers of s = x - first.key.
    CubicModel cubic;
    cubic.origin = first.key;
    cubic.d = first.target;
    cubic.c = m0;
    cubic.b = (3.0 * rise - 2.0 * width * m0 - width * m1) / (width * width);
    cubic.a = (width * m0 + width * m1 - 2.0 * rise) / (width * width * width);
    if (!std::isfinite(cubic.a) || !std::isfinite(cubic.b)) return fallback;

    bool monotone = true;
    double previous = -std::numeric_limits<double>::infinity();
    for_each_pair(pairs, [&](const TrainingPair &p) {
        const double y = cubic(p.key);
        monotone = monotone && y >= previous;
        previous = y;
    });
    return monotone ? cubic : fallback;
}

/**
 * Radix model over sorted @p keys producing values in [0, out_range).
 * left_shift is the length of the prefix shared by the first and last key (64 when they are equal,
 * which maps every key to 0); right_shift is 64 - log2(out_range).
 * Throws std::invalid_argument if @p out_range is not a power of two or @p keys is empty.
 */
RadixModel train_radix(std::span<const Key> keys, std::size_t out_range);

/// Trains a linear or cubic model of @p type; RX is rejected here since it does not use targets.
template<TrainingPairs R>
Model train_model(ModelType type, const R &pairs) {
    switch (type) {
        case ModelType::LinearRegression: return train_linear_regression(pairs);
        case ModelType::LinearSpline: return train_linear_spline(pairs);
        case ModelType::CubicSpline: return train_cubic_spline(pairs);
        case ModelType::Radix: break;
    }
    throw std::invalid_argument("train_model: radix models are trained from keys, use train_radix");
}

} // namespace rmi
