#include "rmi/bench.hpp"

#include "rmi/metrics.hpp"
#include "rmi/random.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <tuple>

namespace rmi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void append_number(std::string &out, double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    out.append(buffer, result.ptr);
}

void append_number(std::string &out, std::size_t value) {
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    out.append(buffer, result.ptr);
}

struct TimedBuild {
    Rmi rmi;
    double seconds;
};

TimedBuild timed_build(const KeySet &ks, const RmiConfig &cfg, std::size_t repeats) {
    if (repeats == 0) throw std::invalid_argument("build bench: repeats must be positive");
    std::vector<double> times;
    times.reserve(repeats);
    auto start = Clock::now();
    Rmi r = build_rmi(ks, cfg);
    times.push_back(seconds_since(start));
    for (std::size_t i = 1; i < repeats; ++i) {
        start = Clock::now();
        r = build_rmi(ks, cfg);
        times.push_back(seconds_since(start));
    }
    return {std::move(r), median(std::move(times))};
}

auto row_order(const BenchResult &r) {
    return std::make_tuple(r.config.root, r.config.leaf, r.config.layer2_size, r.config.bounds, r.search);
}

} // namespace

Workload gen_workload(const KeySet &ks, std::size_t m, std::uint64_t seed) {
    if (m == 0) throw std::invalid_argument("gen_workload: m must be positive");
    Rng rng(seed);
    Workload w;
    w.seed = seed;
    w.queries.resize(m);
    for (auto &q : w.queries) q = ks[rng.below(ks.size())];
    return w;
}

std::uint64_t oracle_checksum(const KeySet &ks, const Workload &w) {
    std::uint64_t acc = checksum_seed;
    for (const Key q : w.queries) acc = checksum_step(acc, lower_bound(ks.keys(), q));
    return acc;
}

double median(std::vector<double> values) { return median_in_place(values); }

double run_build_bench(const KeySet &ks, const RmiConfig &cfg, std::size_t repeats) {
    return timed_build(ks, cfg, repeats).seconds;
}

std::vector<BoundSearch> valid_bound_search_pairs() {
    using B = BoundKind;
    using S = SearchAlgorithm;
    return {
        {B::None, S::ModelBiasedLinear},          {B::None, S::ModelBiasedExponential},
        {B::GlobalAbsolute, S::Binary},           {B::GlobalIndividual, S::Binary},
        {B::GlobalIndividual, S::ModelBiasedBinary}, {B::LocalAbsolute, S::Binary},
        {B::LocalIndividual, S::Binary},          {B::LocalIndividual, S::ModelBiasedBinary},
    };
}

SweepGrid SweepGrid::full(unsigned min_log, unsigned max_log) {
    SweepGrid grid;
    grid.roots = {ModelType::LinearRegression, ModelType::LinearSpline, ModelType::CubicSpline, ModelType::Radix};
    grid.leaves = {ModelType::LinearRegression, ModelType::LinearSpline};
    for (unsigned lg = min_log; lg <= max_log; ++lg) grid.sizes.push_back(std::size_t{1} << lg);
    grid.pairs = valid_bound_search_pairs();
    return grid;
}

bool SweepReport::has_correctness_failure() const noexcept {
    return std::any_of(failures.begin(), failures.end(), [](const SweepFailure &f) { return f.correctness; });
}

SweepReport sweep(const KeySet &ks, const SweepGrid &grid, const SweepOptions &options) {
    SweepReport report;
    const Workload w = gen_workload(ks, options.queries, options.seed);
    const std::uint64_t expected = oracle_checksum(ks, w);

    std::vector<BoundKind> kinds;
    for (const BoundSearch &p : grid.pairs) {
        if (std::find(kinds.begin(), kinds.end(), p.bounds) == kinds.end()) kinds.push_back(p.bounds);
    }

    for (const ModelType root : grid.roots) {
        for (const ModelType leaf : grid.leaves) {
            for (const std::size_t size : grid.sizes) {
                for (const BoundKind kind : kinds) {
                    const RmiConfig cfg{root, leaf, size, kind};
                    auto fail_all = [&](const std::string &reason, bool correctness) {
                        for (const BoundSearch &p : grid.pairs) {
                            if (p.bounds == kind) report.failures.push_back({cfg, p.search, reason, correctness});
                        }
                    };
                    try {
                        auto [r, build_s] = timed_build(ks, cfg, options.build_repeats);
                        const SegmentStats seg = segment_stats(segments_of(r, ks), ks.size());
                        const ErrorStats err = error_stats(r, ks);
                        for (const BoundSearch &p : grid.pairs) {
                            if (p.bounds != kind) continue;
                            const auto runner = [&r, &ks, algo = p.search](Key q) { return r.lookup(ks, q, algo); };
                            if (options.row_time_limit_s > 0.0) {
                                const std::size_t pilot = std::min<std::size_t>(w.m(), 256);
                                const auto start = Clock::now();
                                [[maybe_unused]] volatile std::size_t sink = 0;
                                for (std::size_t i = 0; i != pilot; ++i) sink = runner(w.queries[i]);
                                const double estimate = seconds_since(start) / static_cast<double>(pilot)
                                                        * static_cast<double>(w.m() * options.runs);
                                if (estimate > options.row_time_limit_s) {
                                    report.failures.push_back({cfg, p.search, "skipped: estimated lookup time exceeds row limit", false});
                                    continue;
                                }
                            }
                            try {
                                const LookupTiming t = run_lookup_bench(runner, w, expected, options.runs);
                                BenchResult row;
                                row.dataset = options.dataset;
                                row.config = cfg;
                                row.search = p.search;
                                row.size_bytes = r.size_bytes();
                                row.build_s = build_s;
                                row.lookup_ns = t.ns_per_lookup;
                                row.median_abs_err = err.median_abs_error;
                                row.mean_log2_err = err.mean_log2_error;
                                row.empty_frac = seg.empty_fraction;
                                row.largest_seg = seg.largest_segment;
                                row.median_interval = err.median_interval_size;
                                report.rows.push_back(std::move(row));
                            } catch (const std::exception &e) {
                                report.failures.push_back({cfg, p.search, e.what(), true});
                            }
                        }
                    } catch (const std::exception &e) {
                        fail_all(e.what(), true);
                    }
                }
            }
        }
    }

    std::stable_sort(report.rows.begin(), report.rows.end(),
                     [](const BenchResult &a, const BenchResult &b) { return row_order(a) < row_order(b); });
    return report;
}

std::string csv_row(const BenchResult &r) {
    std::string line = r.dataset;
    line += ',';
    line += to_string(r.config.root);
    line += ',';
    line += to_string(r.config.leaf);
    line += ',';
    append_number(line, r.config.layer2_size);
    line += ',';
    line += to_string(r.config.bounds);
    line += ',';
    line += to_string(r.search);
    line += ',';
    append_number(line, r.size_bytes);
    line += ',';
    append_number(line, r.build_s);
    line += ',';
    append_number(line, r.lookup_ns);
    line += ',';
    append_number(line, r.median_abs_err);
    line += ',';
    append_number(line, r.mean_log2_err);
    line += ',';
    append_number(line, r.empty_frac);
    line += ',';
    append_number(line, r.largest_seg);
    line += ',';
    append_number(line, r.median_interval);
    return line;
}

void write_csv(std::ostream &out, const std::vector<BenchResult> &rows) {
    out << csv_header << '\n';
    for (const BenchResult &r : rows) out << csv_row(r) << '\n';
}

} // namespace rmi
