#include "rmi/guideline.hpp"

#include "rmi/metrics.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rmi {

std::string_view to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::NoBoundsExponential: return "NB+MExp";
        case Strategy::LocalAbsoluteBinary: return "LAbs+Bin";
    }
    return "?";
}

BoundKind strategy_bounds(Strategy strategy) noexcept {
    return strategy == Strategy::NoBoundsExponential ? BoundKind::None : BoundKind::LocalAbsolute;
}

SearchAlgorithm strategy_search(Strategy strategy) noexcept {
    return strategy == Strategy::NoBoundsExponential ? SearchAlgorithm::ModelBiasedExponential : SearchAlgorithm::Binary;
}

void GuidelineInput::validate() const {
    if (!(threshold > 0.0)) throw std::invalid_argument("guideline: threshold must be positive");
    if (!std::has_single_bit(min_size) || !std::has_single_bit(max_size) || min_size < min_layer2_size
        || max_size > max_layer2_size || min_size > max_size)
        throw std::invalid_argument("guideline: size range must be powers of two within [2^6, 2^25]");
}

std::size_t max_layer_size_within_budget(std::size_t budget, BoundKind kind, ModelType root, ModelType leaf,
                                         std::size_t min_size, std::size_t max_size) {
    std::size_t best = 0;
    for (std::size_t s = min_size; s <= max_size; s *= 2) {
        if (rmi_size_bytes(RmiConfig{root, leaf, s, kind}) > budget) break;
        best = s;
    }
    if (best == 0)
        throw std::invalid_argument("guideline: budget of " + std::to_string(budget) + " bytes is below the "
                                    + std::to_string(rmi_size_bytes(RmiConfig{root, leaf, min_size, kind}))
                                    + " bytes of the smallest index");
    return best;
}

GuidelineOutcome configure(const KeySet &ks, const GuidelineInput &input) {
    input.validate();
    constexpr ModelType root = ModelType::LinearSpline;
    constexpr ModelType leaf = ModelType::LinearRegression;

    const std::size_t nb_size =
        max_layer_size_within_budget(input.budget, BoundKind::None, root, leaf, input.min_size, input.max_size);
    Rmi nb = build_rmi(ks, RmiConfig{root, leaf, nb_size, BoundKind::None});
    const double error = mean_log2_error(nb, ks);
    if (error <= input.threshold) return GuidelineOutcome{std::move(nb), Strategy::NoBoundsExponential, error, 1};

    const std::size_t labs_size =
        max_layer_size_within_budget(input.budget, BoundKind::LocalAbsolute, root, leaf, input.min_size, input.max_size);
    Rmi labs = build_rmi(ks, RmiConfig{root, leaf, labs_size, BoundKind::LocalAbsolute});
    return GuidelineOutcome{std::move(labs), Strategy::LocalAbsoluteBinary, error, 2};
}

} // namespace rmi
