#pragma once

#include "rmi/keyset.hpp"
#include "rmi/models.hpp"
#include "rmi/search.hpp"

#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace rmi {

/// Error-bound schemes.
enum class BoundKind : std::uint8_t {
    None = 0,             ///< NB
    GlobalAbsolute = 1,   ///< GAbs: max absolute error over the whole index
    GlobalIndividual = 2, ///< GInd: max over- and underestimation over the whole index
    LocalAbsolute = 3,    ///< LAbs: max absolute error per leaf model
    LocalIndividual = 4,  ///< LInd: max over- and underestimation per leaf model
};

std::string_view to_string(BoundKind kind);
/// Accepts NB, GAbs, GInd, LAbs, LInd (case-insensitive). Throws std::invalid_argument otherwise.
BoundKind parse_bound_kind(std::string_view text);

constexpr bool is_local(BoundKind kind) noexcept {
    return kind == BoundKind::LocalAbsolute || kind == BoundKind::LocalIndividual;
}

/// Bytes of stored bounds for an index with @p layer2_size leaves.
std::size_t bound_bytes(BoundKind kind, std::size_t layer2_size);

/// Raised when a trained model breaks an invariant the index relies on.
class InvariantError : public std::logic_error
{
    public:
    using std::logic_error::logic_error;
};

inline constexpr std::size_t min_layer2_size = std::size_t{1} << 6;
inline constexpr std::size_t max_layer2_size = std::size_t{1} << 25;

struct RmiConfig {
    ModelType root = ModelType::LinearSpline;
    ModelType leaf = ModelType::LinearRegression;
    std::size_t layer2_size = std::size_t{1} << 10;
    BoundKind bounds = BoundKind::None;

    /// Throws std::invalid_argument unless layer2_size is a power of two in [2^6, 2^25] and the
    /// leaf type is LR or LS.
    void validate() const;

    friend bool operator==(const RmiConfig &, const RmiConfig &) = default;
};

/// Search slack around an estimate: the true position lies in [est - below, est + above].
struct Slack {
    std::uint64_t below = 0; ///< largest overestimation
    std::uint64_t above = 0; ///< largest underestimation
    friend bool operator==(const Slack &, const Slack &) = default;
};

/// Stored error bounds of one of the five kinds.
class ErrorBounds
{
    BoundKind kind_ = BoundKind::None;
    std::vector<std::uint64_t> absolute_; ///< GAbs: one entry; LAbs: one per leaf
    std::vector<Slack> individual_;       ///< GInd: one entry; LInd: one per leaf

    public:
    ErrorBounds() = default;

    static ErrorBounds global_absolute(std::uint64_t err);
    static ErrorBounds global_individual(Slack slack);
    static ErrorBounds local_absolute(std::vector<std::uint64_t> errs);
    static ErrorBounds local_individual(std::vector<Slack> slacks);

    BoundKind kind() const noexcept { return kind_; }
    std::span<const std::uint64_t> absolute() const noexcept { return absolute_; }
    std::span<const Slack> individual() const noexcept { return individual_; }

    /// Slack applying to keys routed to @p leaf. Must not be called for BoundKind::None.
    Slack slack(std::size_t leaf) const noexcept {
        switch (kind_) {
            case BoundKind::GlobalAbsolute: return {absolute_[0], absolute_[0]};
            case BoundKind::LocalAbsolute: return {absolute_[leaf], absolute_[leaf]};
            case BoundKind::GlobalIndividual: return individual_[0];
            case BoundKind::LocalIndividual: return individual_[leaf];
            case BoundKind::None: break;
        }
        return {};
    }

    friend bool operator==(const ErrorBounds &, const ErrorBounds &) = default;
};

/**
 * Accumulates per-key prediction errors into ErrorBounds of a given kind.
 * For a key at true position p with estimate e, overestimation is max(0, e - p) and
 * underestimation is max(0, p - e).
 */
class BoundsAccumulator
{
    BoundKind kind_;
    std::vector<Slack> slacks_;

    public:
    BoundsAccumulator(BoundKind kind, std::size_t layer2_size);

    void add(std::size_t leaf, std::size_t estimate, std::size_t position) noexcept {
        if (kind_ == BoundKind::None) return;
        Slack &s = slacks_[is_local(kind_) ? leaf : 0];
        if (estimate > position) {
            s.below = std::max<std::uint64_t>(s.below, estimate - position);
        } else {
            s.above = std::max<std::uint64_t>(s.above, position - estimate);
        }
    }

    ErrorBounds finish() const;
};

/// Position estimate with its half-open search interval [lo, hi).
struct Prediction {
    std::size_t est;
    std::size_t lo;
    std::size_t hi;
    friend bool operator==(const Prediction &, const Prediction &) = default;
};

/// Half-open range of key positions routed to one leaf model.
struct Segment {
    std::size_t begin;
    std::size_t end;
    std::size_t size() const noexcept { return end - begin; }
    friend bool operator==(const Segment &, const Segment &) = default;
};

/// max(a, min(p, b))
constexpr double clamp(double p, double a, double b) noexcept { return std::max(a, std::min(p, b)); }

/// floor(clamp(value, 0, q - 1)) for a root trained directly on segment indices.
inline std::size_t segment_index(double value, std::size_t q) noexcept {
    return static_cast<std::size_t>(std::floor(clamp(value, 0.0, static_cast<double>(q - 1))));
}

/// floor(clamp(q * f(x) / n, 0, q - 1)): the next-layer index for a model predicting positions.
inline std::size_t get_model_index(Key x, const Model &f, std::size_t q, std::size_t n) {
    return segment_index(static_cast<double>(q) * eval_model(f, x) / static_cast<double>(n), q);
}

/// Whether a root predicts positions (scaled by q / n at lookup) or segment indices directly.
enum class TargetSpace { SegmentIndex, Position };

/**
 * Partitions sorted @p keys into @p q contiguous segments by the root's next-layer index, in a
 * single pass that records segment boundaries instead of copying keys. Empty segments are
 * (p, p) ranges at the position where they would start. Throws InvariantError if the root maps a
 * key to a smaller segment than its predecessor.
 */
std::vector<Segment> segment_boundaries(const Model &root, std::span<const Key> keys, std::size_t q,
                                        TargetSpace space = TargetSpace::SegmentIndex);

/**
 * Two-layer recursive model index over a sorted key array.
 *
 * The root is trained on (key, position * q / n) so it yields a leaf index directly. Each leaf is
 * a LinearModel trained on the (key, lower-bound position) pairs of its segment. An Rmi does not
 * own the keys; lookups take the KeySet it was built on.
 */
class Rmi
{
    RmiConfig config_;
    std::size_t n_ = 0;
    Model root_;
    std::vector<LinearModel> leaves_;
    ErrorBounds bounds_;

    Rmi(RmiConfig config, std::size_t n, Model root, std::vector<LinearModel> leaves, ErrorBounds bounds);

    public:
    /// Assembles an index from trained parts, checking that they agree with @p config.
    static Rmi from_parts(RmiConfig config, std::size_t n, Model root, std::vector<LinearModel> leaves,
                          ErrorBounds bounds);

    const RmiConfig &config() const noexcept { return config_; }
    std::size_t n() const noexcept { return n_; }
    const Model &root() const noexcept { return root_; }
    std::span<const LinearModel> leaves() const noexcept { return leaves_; }
    const ErrorBounds &bounds() const noexcept { return bounds_; }

    double root_estimate(Key x) const noexcept {
        switch (root_.index()) {
            case 0: return (*std::get_if<LinearModel>(&root_))(x);
            case 1: return (*std::get_if<CubicModel>(&root_))(x);
            default: return (*std::get_if<RadixModel>(&root_))(x);
        }
    }

    std::size_t leaf_index(Key x) const noexcept { return segment_index(root_estimate(x), leaves_.size()); }

    /// floor(clamp(leaf(x), 0, n - 1)) for the leaf chosen by the root.
    std::size_t estimate(Key x, std::size_t leaf) const noexcept {
        return static_cast<std::size_t>(std::floor(clamp(leaves_[leaf](x), 0.0, static_cast<double>(n_ - 1))));
    }
    std::size_t estimate(Key x) const noexcept { return estimate(x, leaf_index(x)); }

    /**
     * Estimate and search interval. With bounds, [lo, hi) = [est - below, est + above + 1)
     * clamped to [0, n); without bounds the interval is the whole array.
     */
    Prediction predict(Key x) const noexcept {
        const std::size_t leaf = leaf_index(x);
        const std::size_t est = estimate(x, leaf);
        if (bounds_.kind() == BoundKind::None) return {est, 0, n_};
        const Slack s = bounds_.slack(leaf);
        const std::size_t lo = est > s.below ? est - s.below : 0;
        const std::size_t hi = s.above < n_ - est ? est + s.above + 1 : n_;
        return {est, lo, hi};
    }

    /**
     * Lower-bound position of @p q in @p keys, which must be the keys this index was built on.
     * Bounded searches are checked at the interval edges and fall back to exponential search
     * from the edge when an absent key falls outside the interval, so every query is exact.
     * Throws std::invalid_argument for Bin or MBin without bounds.
     */
    std::size_t lookup(std::span<const Key> keys, Key q, SearchAlgorithm algorithm) const {
        assert(keys.size() == n_);
        const Prediction p = predict(q);
        switch (algorithm) {
            case SearchAlgorithm::ModelBiasedLinear: return model_biased_linear(keys, q, p.est);
            case SearchAlgorithm::ModelBiasedExponential: return model_biased_exponential(keys, q, p.est);
            case SearchAlgorithm::Binary:
            case SearchAlgorithm::ModelBiasedBinary: break;
        }
        if (bounds_.kind() == BoundKind::None)
            throw std::invalid_argument("lookup: binary search variants require error bounds");
        const std::size_t pos = algorithm == SearchAlgorithm::Binary
                                    ? binary_search(keys, q, p.lo, p.hi)
                                    : model_biased_binary(keys, q, p.lo, p.hi, p.est);
        const bool escaped_right = pos == p.hi && pos < n_ && keys[pos] < q;
        const bool escaped_left = pos == p.lo && pos > 0 && !(keys[pos - 1] < q);
        if (escaped_right || escaped_left) [[unlikely]]
            return model_biased_exponential(keys, q, std::min(pos, n_ - 1));
        return pos;
    }
    std::size_t lookup(const KeySet &ks, Key q, SearchAlgorithm algorithm) const {
        return lookup(ks.keys(), q, algorithm);
    }

    /// Root + leaves + bounds payload; the key count and configuration are not counted.
    std::size_t size_bytes() const noexcept;

    /// Same models with bounds of @p kind recomputed over @p ks.
    Rmi with_bounds(const KeySet &ks, BoundKind kind) const;
};

/// Trains a two-layer index over @p ks.
Rmi build_rmi(const KeySet &ks, const RmiConfig &config);

/// Bounds of @p kind for the models of @p r, from evaluating @p r on every key of @p ks.
ErrorBounds compute_bounds(const Rmi &r, const KeySet &ks, BoundKind kind);

/// Size in bytes of an index with the given configuration (independent of the data).
std::size_t rmi_size_bytes(const RmiConfig &config);

/// Current serialized format version.
inline constexpr std::uint8_t rmi_format_version = 1;

/// Binary encoding of an index; layout documented in docs/index_format.md.
std::vector<std::uint8_t> serialize_rmi(const Rmi &r);
/// Throws FormatError on malformed input, unknown version, or trailing bytes.
Rmi deserialize_rmi(std::span<const std::uint8_t> bytes);

void save_rmi(const Rmi &r, const std::filesystem::path &path);
Rmi load_rmi(const std::filesystem::path &path);

} // namespace rmi
