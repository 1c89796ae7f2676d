#pragma once

#include <json.hpp>
#include <stdexcept>
#include <string>

#include "strata/core/keypoint.hpp"

namespace strata {

// A keypoint set serializes to a JSON array; one object per keypoint with
// fields x, y, sigma, orientation, descriptor[128].

template <typename Scalar>
nlohmann::json keypoints_to_json(const KeypointSet<Scalar>& set) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& kp : set.keypoints) {
    nlohmann::json desc = nlohmann::json::array();
    for (int d = 0; d < kDescriptorSize; ++d)
      desc.push_back(static_cast<double>(kp.descriptor[d]));
    arr.push_back({{"x", static_cast<double>(kp.x)},
                   {"y", static_cast<double>(kp.y)},
                   {"sigma", static_cast<double>(kp.sigma)},
                   {"orientation", static_cast<double>(kp.orientation)},
                   {"descriptor", std::move(desc)}});
  }
  return arr;
}

template <typename Scalar>
KeypointSet<Scalar> keypoints_from_json(const nlohmann::json& arr,
                                        std::string source_image_id) {
  if (!arr.is_array())
    throw std::invalid_argument("keypoint document must be a JSON array");
  KeypointSet<Scalar> set;
  set.source_image_id = std::move(source_image_id);
  set.keypoints.reserve(arr.size());
  for (const auto& item : arr) {
    Keypoint<Scalar> kp;
    kp.x = static_cast<Scalar>(item.at("x").get<double>());
    kp.y = static_cast<Scalar>(item.at("y").get<double>());
    kp.sigma = static_cast<Scalar>(item.at("sigma").get<double>());
    kp.orientation =
        static_cast<Scalar>(item.at("orientation").get<double>());
    const auto& desc = item.at("descriptor");
    if (!desc.is_array() || desc.size() != kDescriptorSize)
      throw std::invalid_argument("descriptor must hold 128 values");
    for (int d = 0; d < kDescriptorSize; ++d)
      kp.descriptor[d] =
          static_cast<Scalar>(desc[static_cast<std::size_t>(d)].get<double>());
    set.keypoints.push_back(std::move(kp));
  }
  return set;
}

}  // namespace strata
