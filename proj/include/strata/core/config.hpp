#pragma once

#include <filesystem>
#include <string>

namespace strata {

/// Detector knobs. The keypoint detector itself is standard; every value
/// here is exposed through the JSON config under the "detector" key.
struct DetectorParams {
  int octave_count = 0;  // 0 derives the largest feasible count, capped at 4
  int scales_per_octave = 3;
  float base_sigma = 1.6f;
  float contrast_threshold = 0.03f;
  float edge_ratio_threshold = 10.0f;
};

/// Matching-pipeline parameters. Field names match the JSON config document
/// one to one (snake_case).
struct PipelineConfig {
  int nobins = 10;                   // gradient-histogram bin count
  double hp_percent = 30.0;          // strong-peak lower bound, % of matches
  double lp_percent = 10.0;          // weak-peak upper bound, % of matches
  double angular_half_width = 90.0;  // retention half-range, degrees
  double scale_tolerance = 0.2;      // psi window around sf
  double nn_ratio_threshold = 0.8;   // Strata I nearest-neighbor ratio
  int decision_threshold = 5;        // minimum eta for a genuine verdict
  DetectorParams detector;

  /// Throws std::invalid_argument on any out-of-range field.
  void validate() const;
};

PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& json_text);
std::string config_to_json_text(const PipelineConfig& cfg);

}  // namespace strata
