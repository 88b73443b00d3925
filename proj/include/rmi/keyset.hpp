#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmi {

using Key = std::uint64_t;

/// Raised when a key or index file cannot be read or written.
class IoError : public std::runtime_error
{
    public:
    using std::runtime_error::runtime_error;
};

/// Raised when file contents do not match the expected layout.
class FormatError : public std::runtime_error
{
    public:
    using std::runtime_error::runtime_error;
};

/**
 * Immutable, non-empty array of 64-bit keys sorted in non-decreasing order. Duplicates are allowed.
 * Positions used throughout the library are lower-bound positions: the index of the first
 * occurrence of a key.
 */
class KeySet
{
    std::vector<Key> keys_;

    public:
    /// Takes ownership of @p keys; throws std::invalid_argument if empty or unsorted.
    explicit KeySet(std::vector<Key> keys);

    /// Sorts @p keys before taking ownership; throws std::invalid_argument if empty.
    static KeySet from_unsorted(std::vector<Key> keys);

    std::span<const Key> keys() const noexcept { return keys_; }
    std::size_t size() const noexcept { return keys_.size(); }
    Key operator[](std::size_t i) const noexcept { return keys_[i]; }
    Key front() const noexcept { return keys_.front(); }
    Key back() const noexcept { return keys_.back(); }

    friend bool operator==(const KeySet &, const KeySet &) = default;
};

/// Smallest index i with keys[i] >= q, or n if every key is smaller than q.
inline std::size_t lower_bound(std::span<const Key> keys, Key q);
std::size_t lower_bound(const KeySet &ks, Key q);

struct LoadedKeySet {
    KeySet keys;
    bool sorted_on_load; ///< true if the file payload was not already sorted
};

/**
 * Reads a key file: one little-endian u64 count followed by that many little-endian u64 keys.
 * Throws IoError if the file cannot be read and FormatError if the payload length disagrees
 * with the count or the count is zero.
 */
LoadedKeySet load_keyset(const std::filesystem::path &path);

/// Writes @p ks in the format read by load_keyset. Throws IoError on failure.
void save_keyset(const KeySet &ks, const std::filesystem::path &path);

/// @name Synthetic generators
/// Each generator is a pure function of its arguments and returns n sorted keys.
/// Parameter violations throw std::invalid_argument.
/// @{

/// Keys drawn uniformly from the closed range [lo, hi].
KeySet gen_uniform(std::size_t n, std::uint64_t seed, Key lo, Key hi);

/// exp(mu + sigma * z) draws, scaled so the largest draw maps to the top of [0, 2^63).
KeySet gen_lognormal(std::size_t n, std::uint64_t seed, double mu, double sigma);

/// Keys uniform within @p spread of one of @p n_clusters uniformly placed cluster origins.
KeySet gen_clustered(std::size_t n, std::uint64_t seed, std::size_t n_clusters, Key spread);

/**
 * Uniform keys in [0, 2^(62 - shift)) plus ceil(fraction * n) outliers: draws from
 * [2^(62 - shift), 2^(63 - shift)) shifted left by @p magnitude_shift bits. Every outlier lands in
 * [2^62, 2^63), at least 2^magnitude_shift times the median key.
 */
KeySet gen_outliers(std::size_t n, std::uint64_t seed, double outlier_fraction, unsigned magnitude_shift);

/// n keys drawn uniformly with replacement from @p distinct random values.
KeySet gen_duplicates(std::size_t n, std::uint64_t seed, std::size_t distinct);

/// @}

/// Number of outliers gen_outliers places for the given parameters.
std::size_t outlier_count(std::size_t n, double outlier_fraction);

inline std::size_t lower_bound(std::span<const Key> keys, Key q) {
    std::size_t lo = 0;
    std::size_t len = keys.size();
    while (len > 0) {
        const std::size_t half = len / 2;
        if (keys[lo + half] < q) {
            lo += half + 1;
            len -= half + 1;
        } else {
            len = half;
        }
    }
    return lo;
}

} // namespace rmi
