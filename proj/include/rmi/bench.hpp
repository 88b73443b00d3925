#pragma once

#include "rmi/keyset.hpp"
#include "rmi/rmi.hpp"
#include "rmi/search.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmi {

/// Raised when a benchmarked index returns wrong or non-reproducible answers.
class CorrectnessError : public std::runtime_error
{
    public:
    using std::runtime_error::runtime_error;
};

/// Lookup keys sampled uniformly with replacement from a key set.
struct Workload {
    std::vector<Key> queries;
    std::uint64_t seed = 0;
    std::size_t m() const noexcept { return queries.size(); }
};

/// Throws std::invalid_argument if @p m is zero.
Workload gen_workload(const KeySet &ks, std::size_t m, std::uint64_t seed);

/// Order-sensitive hash of returned positions, folded one answer at a time.
constexpr std::uint64_t checksum_seed = 0xcbf29ce484222325ULL;
constexpr std::uint64_t checksum_step(std::uint64_t acc, std::size_t position) noexcept {
    return (acc ^ static_cast<std::uint64_t>(position)) * 0x100000001b3ULL + 0x9e3779b97f4a7c15ULL;
}

/// Checksum of the true lower-bound answers for @p w.
std::uint64_t oracle_checksum(const KeySet &ks, const Workload &w);

/// Median (mean of the middle pair for an even count). Throws std::invalid_argument if empty.
double median(std::vector<double> values);

struct LookupTiming {
    double ns_per_lookup = 0.0;  ///< median run total / m
    std::uint64_t checksum = 0;
    std::vector<double> run_ns;  ///< total nanoseconds of each run, in execution order
};

/**
 * Times @p runs passes of @p runner over every query of @p w. runner(q) returns a position.
 * Throws CorrectnessError if a run's checksum differs from @p expected_checksum.
 */
template<typename Runner>
LookupTiming run_lookup_bench(Runner &&runner, const Workload &w, std::uint64_t expected_checksum, std::size_t runs = 3) {
    if (runs == 0) throw std::invalid_argument("run_lookup_bench: runs must be positive");
    if (w.m() == 0) throw std::invalid_argument("run_lookup_bench: empty workload");
    LookupTiming timing;
    timing.run_ns.reserve(runs);
    for (std::size_t run = 0; run != runs; ++run) {
        std::uint64_t acc = checksum_seed;
        const auto start = std::chrono::steady_clock::now();
        for (const Key q : w.queries) acc = checksum_step(acc, runner(q));
        const auto stop = std::chrono::steady_clock::now();
        timing.run_ns.push_back(std::chrono::duration<double, std::nano>(stop - start).count());
        if (acc != expected_checksum)
            throw CorrectnessError("lookup checksum mismatch in run " + std::to_string(run + 1) + " of " + std::to_string(runs));
        timing.checksum = acc;
    }
    timing.ns_per_lookup = median(timing.run_ns) / static_cast<double>(w.m());
    return timing;
}

/// As above, with the expected checksum computed from binary search over @p ks.
template<typename Runner>
LookupTiming run_lookup_bench(Runner &&runner, const KeySet &ks, const Workload &w, std::size_t runs = 3) {
    return run_lookup_bench(runner, w, oracle_checksum(ks, w), runs);
}

/// Median wall-clock seconds of @p repeats calls to build_rmi(ks, cfg).
double run_build_bench(const KeySet &ks, const RmiConfig &cfg, std::size_t repeats = 1);

/// One measured configuration; the columns of the sweep CSV.
struct BenchResult {
    std::string dataset;
    RmiConfig config;
    SearchAlgorithm search = SearchAlgorithm::ModelBiasedExponential;
    std::size_t size_bytes = 0;
    double build_s = 0.0;
    double lookup_ns = 0.0;
    double median_abs_err = 0.0;
    double mean_log2_err = 0.0;
    double empty_frac = 0.0;
    std::size_t largest_seg = 0;
    double median_interval = 0.0;
};

struct BoundSearch {
    BoundKind bounds;
    SearchAlgorithm search;
    friend bool operator==(const BoundSearch &, const BoundSearch &) = default;
};

/// NB+MLin, NB+MExp, GAbs+Bin, GInd+Bin, GInd+MBin, LAbs+Bin, LInd+Bin, LInd+MBin.
std::vector<BoundSearch> valid_bound_search_pairs();

struct SweepGrid {
    std::vector<ModelType> roots;
    std::vector<ModelType> leaves;
    std::vector<std::size_t> sizes;
    std::vector<BoundSearch> pairs;

    /// All four roots, LR and LS leaves, sizes 2^min_log..2^max_log, all valid pairs.
    static SweepGrid full(unsigned min_log = 6, unsigned max_log = 18);
    std::size_t rows() const noexcept { return roots.size() * leaves.size() * sizes.size() * pairs.size(); }
};

struct SweepOptions {
    std::string dataset = "dataset";
    std::size_t queries = 1'000'000;
    std::size_t runs = 3;
    std::size_t build_repeats = 1;
    std::uint64_t seed = 1;
    /// Rows whose estimated lookup time (from a short pilot) exceeds this many seconds are skipped
    /// and recorded as failures. Zero disables the guard.
    double row_time_limit_s = 0.0;
};

struct SweepFailure {
    RmiConfig config;
    SearchAlgorithm search;
    std::string reason;
    bool correctness; ///< false for rows skipped by the time guard
};

struct SweepReport {
    std::vector<BenchResult> rows;      ///< sorted by (root, leaf, size, bounds, search)
    std::vector<SweepFailure> failures;
    bool has_correctness_failure() const noexcept;
};

/// Builds and measures every grid configuration on @p ks. Row failures do not stop the sweep.
SweepReport sweep(const KeySet &ks, const SweepGrid &grid, const SweepOptions &options);

inline constexpr std::string_view csv_header =
    "dataset,root,leaf,layer2_size,bounds,search,size_bytes,build_s,lookup_ns,median_abs_err,mean_log2_err,"
    "empty_frac,largest_seg,median_interval";

/// One CSV line (no trailing newline), locale independent.
std::string csv_row(const BenchResult &r);
/// Header line followed by one line per row.
void write_csv(std::ostream &out, const std::vector<BenchResult> &rows);

} // namespace rmi
