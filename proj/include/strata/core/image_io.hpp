#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>

#include "strata/core/image.hpp"

namespace strata {

struct LoadOptions {
  /// When the raster is larger than 2r x 2r, cut the centered 2r x 2r
  /// window instead of failing. Never pads: a padded raster would no longer
  /// be concentric at (r, r).
  bool allow_center_crop = false;
};

/// Decode an 8-bit grayscale raster (PGM P5 or PNG) without normalization.
Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> decode_gray8(
    const std::filesystem::path& path);

/// Load a localized iris image; intensities are normalized to [0, 1].
/// `id` defaults to the file stem when empty.
IrisImageF load_image(const std::filesystem::path& path, int radius,
                      const LoadOptions& options = {}, std::string id = "");

/// Write [0,1] intensities as an 8-bit binary PGM.
void save_pgm(const std::filesystem::path& path,
              const Eigen::ArrayXXf& pixels);

}  // namespace strata
