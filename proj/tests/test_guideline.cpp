#include "rmi/guideline.hpp"

#include "rmi/metrics.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <numeric>

namespace {

using rmi::BoundKind;
using rmi::Key;
using rmi::KeySet;
using rmi::Strategy;

constexpr std::size_t KiB = 1024;
constexpr std::size_t MiB = 1024 * KiB;
constexpr std::size_t GiB = 1024 * MiB;

} // namespace

TEST(BudgetTest, AccountingExamples) {
    // LAbs costs 16 + 8 bytes per leaf plus the 16-byte root: 2^15 * 24 + 16 = 786,448 <= 2^20.
    EXPECT_EQ(rmi::max_layer_size_within_budget(MiB, BoundKind::LocalAbsolute), std::size_t{1} << 15);
    // NB: 2^6 * 16 + 16 = 1040 fits in 2 KiB, 2^7 * 16 + 16 = 2064 does not.
    EXPECT_EQ(rmi::max_layer_size_within_budget(2 * KiB, BoundKind::None), std::size_t{1} << 6);
    EXPECT_EQ(rmi::max_layer_size_within_budget(2064, BoundKind::None), std::size_t{1} << 7);
    EXPECT_EQ(rmi::max_layer_size_within_budget(2063, BoundKind::None), std::size_t{1} << 6);
}

TEST(BudgetTest, LargeBudgetsCapAtTheLargestLayer) {
    for (const auto kind : {BoundKind::None, BoundKind::GlobalAbsolute, BoundKind::GlobalIndividual, BoundKind::LocalAbsolute})
        EXPECT_EQ(rmi::max_layer_size_within_budget(GiB, kind), std::size_t{1} << 25);
    // LInd needs 32 bytes per leaf, so 2^25 leaves take exactly 1 GiB before the root is added.
    EXPECT_EQ(rmi::max_layer_size_within_budget(GiB, BoundKind::LocalIndividual), std::size_t{1} << 24);
    EXPECT_EQ(rmi::max_layer_size_within_budget(GiB + 16, BoundKind::LocalIndividual), std::size_t{1} << 25);
}

TEST(BudgetTest, TooSmallBudgetThrows) {
    EXPECT_THROW(rmi::max_layer_size_within_budget(1039, BoundKind::None), std::invalid_argument);
    EXPECT_NO_THROW(rmi::max_layer_size_within_budget(1040, BoundKind::None));
    EXPECT_THROW(rmi::max_layer_size_within_budget(1500, BoundKind::LocalAbsolute), std::invalid_argument);
}

TEST(GuidelineTest, PerfectDataKeepsTheUnboundedIndex) {
    std::vector<Key> keys(1'000'000);
    std::iota(keys.begin(), keys.end(), Key{0});
    const KeySet ks(std::move(keys));
    const auto out = rmi::configure(ks, rmi::GuidelineInput{MiB});
    EXPECT_EQ(out.strategy, Strategy::NoBoundsExponential);
    EXPECT_EQ(out.rmis_trained, 1);
    EXPECT_EQ(out.measured_mean_log2_error, 0.0);
    EXPECT_EQ(out.rmi.config().bounds, BoundKind::None);
    EXPECT_EQ(out.rmi.config().layer2_size, std::size_t{1} << 15); // 2^16 * 16 + 16 exceeds 2^20
}

TEST(GuidelineTest, InaccurateIndexSwitchesToLocalBounds) {
    const KeySet ks = rmi::gen_outliers(200'000, 1, 1e-3, 40);
    const auto out = rmi::configure(ks, rmi::GuidelineInput{64 * KiB});
    // Branch consistency only; the error value itself is data dependent.
    if (out.measured_mean_log2_error <= rmi::default_log2_error_threshold) {
        EXPECT_EQ(out.strategy, Strategy::NoBoundsExponential);
        EXPECT_EQ(out.rmis_trained, 1);
    } else {
        EXPECT_EQ(out.strategy, Strategy::LocalAbsoluteBinary);
        EXPECT_EQ(out.rmis_trained, 2);
        EXPECT_EQ(out.rmi.config().bounds, BoundKind::LocalAbsolute);
    }
    EXPECT_GT(out.measured_mean_log2_error, rmi::default_log2_error_threshold) << "dataset chosen to exceed the threshold";
}

TEST(GuidelineTest, InfiniteThresholdAlwaysKeepsTheUnboundedIndex) {
    const KeySet ks = rmi::gen_outliers(100'000, 2, 1e-3, 40);
    rmi::GuidelineInput input{64 * KiB, std::numeric_limits<double>::infinity()};
    const auto out = rmi::configure(ks, input);
    EXPECT_EQ(out.strategy, Strategy::NoBoundsExponential);
    EXPECT_EQ(out.rmis_trained, 1);
}

TEST(GuidelineTest, BudgetComplianceBranchConsistencyAndDeterminism) {
    const std::vector<KeySet> datasets{rmi::gen_uniform(50'000, 3, 0, ~Key{0}), rmi::gen_lognormal(50'000, 4, 0.0, 1.0),
                                       rmi::gen_clustered(50'000, 5, 50, Key{1} << 30),
                                       rmi::gen_outliers(50'000, 6, 1e-3, 40), rmi::gen_duplicates(50'000, 7, 2000)};
    for (const auto &ks : datasets) {
        for (const std::size_t budget : {2 * KiB, 64 * KiB, MiB}) {
            rmi::GuidelineInput input{budget};
            const auto out = rmi::configure(ks, input);
            EXPECT_LE(out.rmi.size_bytes(), budget);
            EXPECT_EQ(out.strategy == Strategy::NoBoundsExponential, out.measured_mean_log2_error <= input.threshold);
            EXPECT_EQ(out.rmis_trained, out.strategy == Strategy::NoBoundsExponential ? 1 : 2);
            EXPECT_EQ(out.rmi.config().root, rmi::ModelType::LinearSpline);
            EXPECT_EQ(out.rmi.config().leaf, rmi::ModelType::LinearRegression);
            EXPECT_EQ(out.rmi.config().bounds, rmi::strategy_bounds(out.strategy));
            EXPECT_EQ(out.rmi.config().layer2_size,
                      rmi::max_layer_size_within_budget(budget, rmi::strategy_bounds(out.strategy)));
            const auto again = rmi::configure(ks, input);
            EXPECT_EQ(rmi::serialize_rmi(again.rmi), rmi::serialize_rmi(out.rmi));
            EXPECT_EQ(again.measured_mean_log2_error, out.measured_mean_log2_error);
            // The recorded error is that of the unbounded index at its own maximum size.
            const auto nb = rmi::build_rmi(ks, rmi::RmiConfig{rmi::ModelType::LinearSpline, rmi::ModelType::LinearRegression,
                                                              rmi::max_layer_size_within_budget(budget, BoundKind::None)});
            EXPECT_EQ(out.measured_mean_log2_error, rmi::mean_log2_error(nb, ks));
        }
    }
}

TEST(GuidelineTest, ThresholdTieGoesToTheUnboundedIndex) {
    const KeySet ks = rmi::gen_lognormal(20'000, 8, 0.0, 1.0);
    const auto first = rmi::configure(ks, rmi::GuidelineInput{64 * KiB});
    rmi::GuidelineInput tie{64 * KiB, first.measured_mean_log2_error};
    EXPECT_EQ(rmi::configure(ks, tie).strategy, Strategy::NoBoundsExponential);
    rmi::GuidelineInput below{64 * KiB, std::nextafter(first.measured_mean_log2_error, 0.0)};
    if (below.threshold > 0.0) {
        EXPECT_EQ(rmi::configure(ks, below).strategy, Strategy::LocalAbsoluteBinary);
    }
}

TEST(GuidelineTest, InvalidInputThrows) {
    const KeySet ks({1, 2, 3});
    EXPECT_THROW(rmi::configure(ks, rmi::GuidelineInput{MiB, 0.0}), std::invalid_argument);
    EXPECT_THROW(rmi::configure(ks, rmi::GuidelineInput{100}), std::invalid_argument);
    EXPECT_EQ(rmi::to_string(Strategy::NoBoundsExponential), "NB+MExp");
    EXPECT_EQ(rmi::to_string(Strategy::LocalAbsoluteBinary), "LAbs+Bin");
    EXPECT_EQ(rmi::strategy_search(Strategy::LocalAbsoluteBinary), rmi::SearchAlgorithm::Binary);
}
