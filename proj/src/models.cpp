#include "rmi/models.hpp"

#include <cctype>
#include <stdexcept>
#include <string>

namespace rmi {

std::string_view to_string(ModelType type) {
    switch (type) {
        case ModelType::LinearRegression: return "LR";
        case ModelType::LinearSpline: return "LS";
        case ModelType::CubicSpline: return "CS";
        case ModelType::Radix: return "RX";
    }
    return "?";
}

ModelType parse_model_type(std::string_view text) {
    std::string upper(text);
    for (auto &ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (upper == "LR") return ModelType::LinearRegression;
    if (upper == "LS") return ModelType::LinearSpline;
    if (upper == "CS") return ModelType::CubicSpline;
    if (upper == "RX") return ModelType::Radix;
    throw std::invalid_argument("unknown model type: " + std::string(text));
}

std::size_t model_bytes(ModelType type) {
    switch (type) {
        case ModelType::LinearRegression:
        case ModelType::LinearSpline: return 2 * sizeof(double);
        case ModelType::CubicSpline: return 4 * sizeof(double) + sizeof(Key);
        case ModelType::Radix: return 2;
    }
    return 0;
}

RadixModel train_radix(std::span<const Key> keys, std::size_t out_range) {
    if (keys.empty()) throw std::invalid_argument("train_radix: no keys");
    if (!std::has_single_bit(out_range)) throw std::invalid_argument("train_radix: out_range must be a power of two");
    const auto prefix = std::countl_zero(keys.front() ^ keys.back());
    const auto out_bits = std::countr_zero(out_range);
    return {static_cast<std::uint8_t>(prefix), static_cast<std::uint8_t>(64 - out_bits)};
}

} // namespace rmi
