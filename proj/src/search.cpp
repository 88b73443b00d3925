#include "rmi/search.hpp"

#include <cctype>
#include <stdexcept>
#include <string>

namespace rmi {

std::string_view to_string(SearchAlgorithm algorithm) {
    switch (algorithm) {
        case SearchAlgorithm::Binary: return "Bin";
        case SearchAlgorithm::ModelBiasedBinary: return "MBin";
        case SearchAlgorithm::ModelBiasedLinear: return "MLin";
        case SearchAlgorithm::ModelBiasedExponential: return "MExp";
    }
    return "?";
}

SearchAlgorithm parse_search_algorithm(std::string_view text) {
    std::string upper(text);
    for (auto &ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (upper == "BIN") return SearchAlgorithm::Binary;
    if (upper == "MBIN") return SearchAlgorithm::ModelBiasedBinary;
    if (upper == "MLIN") return SearchAlgorithm::ModelBiasedLinear;
    if (upper == "MEXP") return SearchAlgorithm::ModelBiasedExponential;
    throw std::invalid_argument("unknown search algorithm: " + std::string(text));
}

} // namespace rmi
