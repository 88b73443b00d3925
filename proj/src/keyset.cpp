#include "rmi/keyset.hpp"

#include "rmi/random.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace rmi {

namespace {

constexpr double two_pow_63 = 0x1.0p63;
constexpr Key max_63_bit_key = (Key{1} << 63) - 1;

Key decode_le(const unsigned char *bytes) {
    Key value = 0;
    for (int i = 7; i >= 0; --i) value = (value << 8) | bytes[i];
    return value;
}

void encode_le(Key value, unsigned char *bytes) {
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<unsigned char>(value & 0xFF);
        value >>= 8;
    }
}

/// Maps a real in [0, 1] onto [0, 2^63) by scaling and truncation.
Key scale_to_key_space(double unit) {
    const double scaled = unit * two_pow_63;
    if (!(scaled < two_pow_63)) return max_63_bit_key;
    if (!(scaled > 0.0)) return 0;
    return static_cast<Key>(scaled);
}

KeySet sorted_keyset(std::vector<Key> keys) {
    std::sort(keys.begin(), keys.end());
    return KeySet(std::move(keys));
}

void require(bool condition, const char *message) {
    if (!condition) throw std::invalid_argument(message);
}

} // namespace

KeySet::KeySet(std::vector<Key> keys) : keys_(std::move(keys)) {
    if (keys_.empty()) throw std::invalid_argument("KeySet: at least one key is required");
    if (!std::is_sorted(keys_.begin(), keys_.end()))
        throw std::invalid_argument("KeySet: keys must be sorted in non-decreasing order");
}

KeySet KeySet::from_unsorted(std::vector<Key> keys) {
    if (keys.empty()) throw std::invalid_argument("KeySet: at least one key is required");
    return sorted_keyset(std::move(keys));
}

std::size_t lower_bound(const KeySet &ks, Key q) { return lower_bound(ks.keys(), q); }

LoadedKeySet load_keyset(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open key file: " + path.string());

    std::array<unsigned char, 8> header{};
    if (!in.read(reinterpret_cast<char *>(header.data()), header.size()))
        throw FormatError("key file too short for count header: " + path.string());
    const Key count = decode_le(header.data());

    std::error_code ec;
    const auto file_size = std::filesystem::file_size(path, ec);
    if (ec) throw IoError("cannot stat key file: " + path.string());
    const auto payload = file_size - header.size();
    if (payload % 8 != 0 || payload / 8 != count)
        throw FormatError("key file truncated or oversized: header says " + std::to_string(count) + " keys, payload holds "
                          + std::to_string(payload) + " bytes (" + path.string() + ")");
    if (count == 0) throw FormatError("key file holds zero keys: " + path.string());

    std::vector<Key> keys(count);
    if (!in.read(reinterpret_cast<char *>(keys.data()), static_cast<std::streamsize>(count * 8)))
        throw IoError("failed reading key payload: " + path.string());
    if constexpr (std::endian::native != std::endian::little) {
        for (auto &k : keys) {
            unsigned char bytes[8];
            std::memcpy(bytes, &k, 8);
            k = decode_le(bytes);
        }
    }

    const bool was_sorted = std::is_sorted(keys.begin(), keys.end());
    if (!was_sorted) std::sort(keys.begin(), keys.end());
    return {KeySet(std::move(keys)), !was_sorted};
}

void save_keyset(const KeySet &ks, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open key file for writing: " + path.string());

    unsigned char bytes[8];
    encode_le(ks.size(), bytes);
    out.write(reinterpret_cast<const char *>(bytes), 8);
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char *>(ks.keys().data()), static_cast<std::streamsize>(ks.size() * 8));
    } else {
        for (Key k : ks.keys()) {
            encode_le(k, bytes);
            out.write(reinterpret_cast<const char *>(bytes), 8);
        }
    }
    if (!out.flush()) throw IoError("failed writing key file: " + path.string());
}

KeySet gen_uniform(std::size_t n, std::uint64_t seed, Key lo, Key hi) {
    require(n >= 1, "gen_uniform: n must be positive");
    require(lo <= hi, "gen_uniform: lo must not exceed hi");
    Rng rng(seed);
    const Key width = hi - lo;
    std::vector<Key> keys(n);
    for (auto &k : keys) k = width == ~Key{0} ? rng.next() : lo + rng.below(width + 1);
    return sorted_keyset(std::move(keys));
}

KeySet gen_lognormal(std::size_t n, std::uint64_t seed, double mu, double sigma) {
    require(n >= 1, "gen_lognormal: n must be positive");
    require(std::isfinite(mu), "gen_lognormal: mu must be finite");
    require(std::isfinite(sigma) && sigma > 0.0, "gen_lognormal: sigma must be positive");
    Rng rng(seed);
    std::vector<double> draws(n);
    for (auto &d : draws) d = std::exp(mu + sigma * rng.normal());
    const double largest = *std::max_element(draws.begin(), draws.end());
    require(std::isfinite(largest) && largest > 0.0, "gen_lognormal: draws overflow double range");

    std::vector<Key> keys(n);
    std::transform(draws.begin(), draws.end(), keys.begin(), [largest](double d) { return scale_to_key_space(d / largest); });
    return sorted_keyset(std::move(keys));
}

KeySet gen_clustered(std::size_t n, std::uint64_t seed, std::size_t n_clusters, Key spread) {
    require(n >= 1, "gen_clustered: n must be positive");
    require(n_clusters >= 1, "gen_clustered: n_clusters must be positive");
    require(spread >= 1 && spread <= max_63_bit_key, "gen_clustered: spread must be in [1, 2^63)");
    Rng rng(seed);
    std::vector<Key> origins(n_clusters);
    const Key origin_range = max_63_bit_key - spread + 1;
    for (auto &o : origins) o = rng.below(origin_range);

    std::vector<Key> keys(n);
    for (auto &k : keys) k = origins[rng.below(n_clusters)] + rng.below(spread);
    return sorted_keyset(std::move(keys));
}

std::size_t outlier_count(std::size_t n, double outlier_fraction) {
    // The small relative shrink keeps products such as 1e-4 * 1e6 from rounding up past an integer.
    const double exact = outlier_fraction * static_cast<double>(n);
    const auto count = static_cast<std::size_t>(std::ceil(exact * (1.0 - 1e-12)));
    return std::min(count, n);
}

KeySet gen_outliers(std::size_t n, std::uint64_t seed, double outlier_fraction, unsigned magnitude_shift) {
    require(n >= 1, "gen_outliers: n must be positive");
    require(outlier_fraction > 0.0 && outlier_fraction < 1.0, "gen_outliers: outlier_fraction must lie in (0, 1)");
    require(magnitude_shift >= 1 && magnitude_shift <= 62, "gen_outliers: magnitude_shift must lie in [1, 62]");
    Rng rng(seed);
    const unsigned base_bits = 62 - magnitude_shift;
    const Key base_range = Key{1} << base_bits;
    const std::size_t outliers = outlier_count(n, outlier_fraction);

    std::vector<Key> keys(n);
    for (std::size_t i = 0; i < n - outliers; ++i) keys[i] = rng.below(base_range);
    for (std::size_t i = n - outliers; i < n; ++i) keys[i] = (base_range + rng.below(base_range)) << magnitude_shift;
    return sorted_keyset(std::move(keys));
}

KeySet gen_duplicates(std::size_t n, std::uint64_t seed, std::size_t distinct) {
    require(n >= 1, "gen_duplicates: n must be positive");
    require(distinct >= 1, "gen_duplicates: distinct must be positive");
    Rng rng(seed);
    std::vector<Key> values(distinct);
    for (auto &v : values) v = rng.next() >> 1;

    std::vector<Key> keys(n);
    for (auto &k : keys) k = values[rng.below(distinct)];
    return sorted_keyset(std::move(keys));
}

} // namespace rmi
