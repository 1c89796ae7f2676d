#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace strata {

inline constexpr int kDescriptorSize = 128;

/// A scale-space feature: sub-pixel position, detection scale, dominant
/// gradient direction in degrees [0, 360), and an L2-normalized 128-d
/// descriptor.
template <typename Scalar = float>
struct Keypoint {
  using Descriptor = Eigen::Matrix<Scalar, kDescriptorSize, 1>;

  Scalar x = 0;
  Scalar y = 0;
  Scalar sigma = 0;
  Scalar orientation = 0;
  Descriptor descriptor = Descriptor::Zero();
};

template <typename Scalar = float>
struct KeypointSet {
  std::vector<Keypoint<Scalar>> keypoints;
  std::string source_image_id;

  Eigen::Index cardinality() const {
    return static_cast<Eigen::Index>(keypoints.size());
  }
};

using KeypointF = Keypoint<float>;
using KeypointSetF = KeypointSet<float>;

/// Euclidean distance between two descriptors, accumulated in double.
template <typename Scalar>
Scalar descriptor_distance(const typename Keypoint<Scalar>::Descriptor& a,
                           const typename Keypoint<Scalar>::Descriptor& b) {
  const double d2 = (a - b).template cast<double>().squaredNorm();
  return static_cast<Scalar>(std::sqrt(d2));
}

}  // namespace strata
