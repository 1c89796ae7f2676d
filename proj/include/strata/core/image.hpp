#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>

namespace strata {

/// Smallest iris radius for which a scale space can still be built.
inline constexpr int kMinIrisRadius = 8;

/// Localized iris image: a square grayscale raster of side 2r whose pupil
/// and iris circles are concentric at (r, r). Intensities live in [0, 1].
/// Rasters are indexed pixels(y, x).
template <typename Scalar = float>
class IrisImage {
 public:
  using Raster = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  IrisImage(Raster pixels, int radius, std::string id)
      : pixels_(std::move(pixels)), radius_(radius), id_(std::move(id)) {
    if (radius_ < kMinIrisRadius)
      throw std::invalid_argument("iris radius " + std::to_string(radius_) +
                                  " below minimum " +
                                  std::to_string(kMinIrisRadius));
    if (pixels_.rows() != pixels_.cols() || pixels_.rows() != 2 * radius_)
      throw std::invalid_argument(
          "dimension mismatch: raster is " + std::to_string(pixels_.rows()) +
          "x" + std::to_string(pixels_.cols()) + " but radius " +
          std::to_string(radius_) + " requires " + std::to_string(2 * radius_) +
          "x" + std::to_string(2 * radius_));
    if (!pixels_.isFinite().all() || (pixels_ < Scalar(0)).any() ||
        (pixels_ > Scalar(1)).any())
      throw std::invalid_argument("intensities must be finite within [0,1]");
  }

  const Raster& pixels() const { return pixels_; }
  int radius() const { return radius_; }
  int side() const { return 2 * radius_; }
  const std::string& id() const { return id_; }

  // The implied center is (radius, radius); it is never stored.

 private:
  Raster pixels_;
  int radius_;
  std::string id_;
};

using IrisImageF = IrisImage<float>;

}  // namespace strata
