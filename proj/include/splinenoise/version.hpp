#pragma once

#include <string_view>

namespace splinenoise {

inline constexpr std::string_view kToolName = "splinenoise";
inline constexpr std::string_view kToolVersion = "0.1.0";

// Identifier of the reproducible random-number scheme used by the Monte
// Carlo driver. Echoed into every run manifest so results can be tied to
// the exact stream construction.
inline constexpr std::string_view kRngScheme =
    "splitmix64(seed,sigma_index,trial_index) -> mt19937_64 -> box-muller";

}  // namespace splinenoise
