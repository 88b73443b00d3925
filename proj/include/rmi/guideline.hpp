#pragma once

#include "rmi/keyset.hpp"
#include "rmi/rmi.hpp"
#include "rmi/search.hpp"

#include <cstddef>
#include <string_view>

namespace rmi {

/// Error-correction strategy picked by the guideline.
enum class Strategy : std::uint8_t {
    NoBoundsExponential, ///< NB + MExp
    LocalAbsoluteBinary, ///< LAbs + Bin
};

std::string_view to_string(Strategy strategy);
BoundKind strategy_bounds(Strategy strategy) noexcept;
SearchAlgorithm strategy_search(Strategy strategy) noexcept;

inline constexpr double default_log2_error_threshold = 5.8;

struct GuidelineInput {
    std::size_t budget = std::size_t{1} << 20; ///< bytes available for the index
    double threshold = default_log2_error_threshold;
    std::size_t min_size = min_layer2_size;
    std::size_t max_size = max_layer2_size;

    /// Throws std::invalid_argument for a non-positive threshold or an invalid size range.
    void validate() const;
};

struct GuidelineOutcome {
    Rmi rmi;
    Strategy strategy;
    double measured_mean_log2_error; ///< of the LS->LR index with NB trained in step 1
    int rmis_trained;                ///< 1 or 2
};

/**
 * Largest power of two s in [min_size, max_size] such that an index with s leaves and bounds of
 * @p kind fits in @p budget bytes. Throws std::invalid_argument if not even min_size fits.
 */
std::size_t max_layer_size_within_budget(std::size_t budget, BoundKind kind,
                                         ModelType root = ModelType::LinearSpline,
                                         ModelType leaf = ModelType::LinearRegression,
                                         std::size_t min_size = min_layer2_size,
                                         std::size_t max_size = max_layer2_size);

/**
 * Auto-configuration for @p ks within a byte budget:
 *  1. train LS->LR with NB at the largest size the budget allows;
 *  2. measure its mean log2 error;
 *  3. keep it with MExp if the error is at most the threshold, otherwise train LS->LR with LAbs at
 *     its own largest feasible size and search it with Bin.
 */
GuidelineOutcome configure(const KeySet &ks, const GuidelineInput &input);

} // namespace rmi
