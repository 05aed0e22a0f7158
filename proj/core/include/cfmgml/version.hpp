#pragma once

namespace cfmgml {

inline constexpr const char* kVersion = "0.1.0";

// Format versions for on-disk artifacts.
inline constexpr int kDatasetFormatVersion = 1;
inline constexpr int kModelFormatVersion = 1;
inline constexpr int kPredictionFormatVersion = 1;

}  // namespace cfmgml
