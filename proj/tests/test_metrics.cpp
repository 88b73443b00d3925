#include "rmi/metrics.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

namespace {

using rmi::BoundKind;
using rmi::Key;
using rmi::KeySet;
using rmi::ModelType;
using rmi::RmiConfig;

KeySet dense(std::size_t n) {
    std::vector<Key> keys(n);
    std::iota(keys.begin(), keys.end(), Key{0});
    return KeySet(std::move(keys));
}

/// Every key routed to leaf 0 and estimated at @p est.
rmi::Rmi fixed_estimate_index(std::size_t n, double est, rmi::ErrorBounds bounds) {
    const RmiConfig cfg{ModelType::LinearSpline, ModelType::LinearRegression, 64, bounds.kind()};
    return rmi::Rmi::from_parts(cfg, n, rmi::LinearModel{}, std::vector<rmi::LinearModel>(64, rmi::LinearModel{0.0, est}),
                                std::move(bounds));
}

/// Key i (for i < 64) is routed to leaf i, which predicts ests[i].
rmi::Rmi per_key_index(const std::vector<double> &ests) {
    std::vector<rmi::LinearModel> leaves(64);
    for (std::size_t i = 0; i < ests.size(); ++i) leaves[i] = {0.0, ests[i]};
    return rmi::Rmi::from_parts(RmiConfig{ModelType::LinearSpline, ModelType::LinearRegression, 64}, ests.size(),
                                rmi::LinearModel{1.0, 0.0}, std::move(leaves), {});
}

struct NaiveStats {
    double median_abs;
    double mean_log2;
    double median_interval;
};

NaiveStats naive_stats(const rmi::Rmi &r, const KeySet &ks) {
    const auto pos = rmi::oracle::first_positions(ks.keys());
    std::vector<double> abs_errors;
    std::vector<double> widths;
    double log_sum = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const auto p = r.predict(ks[i]);
        const double e = std::abs(static_cast<double>(p.est) - static_cast<double>(pos[i]));
        abs_errors.push_back(e);
        log_sum += std::log2(1.0 + e);
        widths.push_back(static_cast<double>(p.hi - p.lo));
    }
    return {rmi::oracle::naive_median(abs_errors), log_sum / static_cast<double>(ks.size()),
            r.bounds().kind() == BoundKind::None ? static_cast<double>(ks.size()) : rmi::oracle::naive_median(widths)};
}

} // namespace

TEST(SegmentStatsTest, Examples) {
    const std::vector<rmi::Segment> even{{0, 25}, {25, 50}, {50, 75}, {75, 100}};
    const auto a = rmi::segment_stats(even, 100);
    EXPECT_EQ(a.n_segments, 4u);
    EXPECT_EQ(a.empty_fraction, 0.0);
    EXPECT_EQ(a.largest_segment, 25u);

    const std::vector<rmi::Segment> lumped{{0, 100}, {100, 100}, {100, 100}, {100, 100}};
    const auto b = rmi::segment_stats(lumped, 100);
    EXPECT_EQ(b.empty_fraction, 0.75);
    EXPECT_EQ(b.largest_segment, 100u);

    EXPECT_THROW(rmi::segment_stats(std::vector<rmi::Segment>{{0, 10}, {11, 20}}, 20), std::invalid_argument);
    EXPECT_THROW(rmi::segment_stats(std::vector<rmi::Segment>{{0, 10}}, 20), std::invalid_argument);
}

TEST(SegmentStatsTest, MatchesPerKeyHistogram) {
    const KeySet ks = rmi::gen_clustered(100'000, 1, 50, Key{1} << 36);
    const auto r = rmi::build_rmi(ks, RmiConfig{ModelType::LinearSpline, ModelType::LinearRegression, 4096});
    std::vector<std::size_t> histogram(4096, 0);
    for (const Key k : ks.keys()) ++histogram[rmi::oracle::naive_predict(r, k).leaf];
    const auto stats = rmi::segment_stats(rmi::segments_of(r, ks), ks.size());
    const auto empty = static_cast<double>(std::count(histogram.begin(), histogram.end(), 0u));
    EXPECT_EQ(stats.empty_fraction, empty / 4096.0);
    EXPECT_EQ(stats.largest_segment, *std::max_element(histogram.begin(), histogram.end()));
}

TEST(ErrorMetricsTest, PerfectIndexHasZeroError) {
    const KeySet ks = dense(1000);
    const auto r = rmi::build_rmi(ks, RmiConfig{ModelType::LinearSpline, ModelType::LinearRegression, 64,
                                                BoundKind::LocalIndividual});
    EXPECT_EQ(rmi::median_abs_error(r, ks), 0.0);
    EXPECT_EQ(rmi::mean_log2_error(r, ks), 0.0);
    EXPECT_EQ(rmi::median_interval_size(r, ks), 1.0);
}

TEST(ErrorMetricsTest, EvenCountMedianAndLogFormula) {
    // Keys 0..3 with every estimate at 0: errors {0, 1, 2, 3}.
    const KeySet four({0, 1, 2, 3});
    const auto r = fixed_estimate_index(4, 0.0, {});
    EXPECT_EQ(rmi::median_abs_error(r, four), 1.5);

    // Errors {7, 0, 0, 1, 1, 3, 3, 7}: each of log2(1 + e) in {0, 1, 2, 3} appears twice.
    const auto two_each = per_key_index({7, 1, 2, 4, 3, 2, 3, 0});
    const KeySet eight = dense(8);
    EXPECT_EQ(rmi::mean_log2_error(two_each, eight), 1.5);
    EXPECT_EQ(rmi::median_abs_error(two_each, eight), 2.0);

    EXPECT_EQ(rmi::mean_log2_error(fixed_estimate_index(1, 0.0, {}), KeySet({9})), 0.0);
}

TEST(ErrorMetricsTest, ErrorsOfTwoToTheKMinusOneGiveExactlyK) {
    // Every key is a duplicate of the first one except the last; the estimate sits 2^k - 1 away.
    for (unsigned k = 1; k <= 10; ++k) {
        const std::size_t e = (std::size_t{1} << k) - 1;
        // n = e + 1 copies of one key: position 0, estimate clamped to n - 1 = e.
        const KeySet ks(std::vector<Key>(e + 1, 42));
        const auto r = fixed_estimate_index(ks.size(), 1e9, {});
        EXPECT_EQ(rmi::mean_log2_error(r, ks), static_cast<double>(k));
        EXPECT_EQ(rmi::median_abs_error(r, ks), static_cast<double>(e));
    }
}

TEST(ErrorMetricsTest, IntervalSizeFollowsThePredictionRule) {
    const KeySet ks = dense(1000);
    const auto gabs = fixed_estimate_index(1000, 500.0, rmi::ErrorBounds::global_absolute(4));
    EXPECT_EQ(rmi::median_interval_size(gabs, ks), 9.0);
    const auto nb = fixed_estimate_index(1000, 500.0, {});
    EXPECT_EQ(rmi::median_interval_size(nb, ks), 1000.0);
}

TEST(ErrorMetricsTest, LocalIntervalsAreNoWiderThanGlobal) {
    const KeySet ks = rmi::gen_lognormal(50'000, 3, 0.0, 1.0);
    const auto base = rmi::build_rmi(ks, RmiConfig{ModelType::LinearSpline, ModelType::LinearRegression, 1024});
    EXPECT_LE(rmi::median_interval_size(base.with_bounds(ks, BoundKind::LocalIndividual), ks),
              rmi::median_interval_size(base.with_bounds(ks, BoundKind::GlobalIndividual), ks));
    EXPECT_LE(rmi::median_interval_size(base.with_bounds(ks, BoundKind::LocalAbsolute), ks),
              rmi::median_interval_size(base.with_bounds(ks, BoundKind::GlobalAbsolute), ks));
}

TEST(ErrorMetricsTest, MatchBruteForceOracle) {
    const std::vector<KeySet> datasets{rmi::gen_lognormal(100'000, 4, 0.0, 1.0), rmi::gen_duplicates(50'000, 5, 1000),
                                       rmi::gen_outliers(50'000, 6, 0.001, 30)};
    const std::vector<BoundKind> kinds{BoundKind::None, BoundKind::GlobalAbsolute, BoundKind::LocalIndividual};
    for (const auto &ks : datasets) {
        for (const auto root : {ModelType::LinearSpline, ModelType::Radix}) {
            for (const auto kind : kinds) {
                const auto r = rmi::build_rmi(ks, RmiConfig{root, ModelType::LinearRegression, 1024, kind});
                const auto ref = naive_stats(r, ks);
                EXPECT_EQ(rmi::median_abs_error(r, ks), ref.median_abs);
                EXPECT_EQ(rmi::mean_log2_error(r, ks), ref.mean_log2);
                EXPECT_EQ(rmi::median_interval_size(r, ks), ref.median_interval);
                const auto all = rmi::error_stats(r, ks);
                EXPECT_EQ(all.median_abs_error, ref.median_abs);
                EXPECT_EQ(all.mean_log2_error, ref.mean_log2);
                EXPECT_EQ(all.median_interval_size, ref.median_interval);
            }
        }
    }
}

TEST(ErrorMetricsTest, AccuracyImprovesWithLayerSizeOnMostSteps) {
    const std::vector<KeySet> datasets{rmi::gen_uniform(200'000, 7, 0, ~Key{0} >> 1), rmi::gen_lognormal(200'000, 8, 0.0, 1.0),
                                       rmi::gen_clustered(200'000, 9, 100, Key{1} << 40),
                                       rmi::gen_outliers(200'000, 10, 1e-4, 40)};
    std::size_t steps = 0;
    std::size_t non_increasing = 0;
    for (const auto &ks : datasets) {
        double previous = -1.0;
        for (std::size_t q = 64; q <= (std::size_t{1} << 16); q *= 2) {
            const double err = rmi::median_abs_error(
                rmi::build_rmi(ks, RmiConfig{ModelType::LinearSpline, ModelType::LinearRegression, q}), ks);
            if (previous >= 0.0) {
                ++steps;
                non_increasing += err <= previous ? 1 : 0;
            }
            previous = err;
        }
    }
    EXPECT_GE(static_cast<double>(non_increasing), 0.9 * static_cast<double>(steps))
        << non_increasing << " of " << steps << " steps";
}

TEST(MedianTest, OddAndEven) {
    std::vector<std::uint64_t> odd{5, 1, 3};
    EXPECT_EQ(rmi::median_in_place(odd), 3.0);
    std::vector<std::uint64_t> even{4, 1, 3, 2};
    EXPECT_EQ(rmi::median_in_place(even), 2.5);
    std::vector<double> empty;
    EXPECT_THROW(rmi::median_in_place(std::span<double>(empty)), std::invalid_argument);
}
