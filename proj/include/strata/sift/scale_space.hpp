#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "strata/core/image.hpp"

namespace strata::sift {

template <typename Scalar>
using Raster = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Normalized sampled Gaussian, radius ceil(3*sigma).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gaussian_kernel(Scalar sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> k(2 * radius + 1);
  const double inv = 1.0 / (2.0 * static_cast<double>(sigma) * sigma);
  for (int i = -radius; i <= radius; ++i)
    k[i + radius] = static_cast<Scalar>(std::exp(-i * i * inv));
  k /= k.sum();
  return k;
}

/// Mirror index into [0, n), reflecting about the edge samples (reflect-101).
inline Eigen::Index reflect_index(Eigen::Index i, Eigen::Index n) {
  if (n == 1) return 0;
  const Eigen::Index period = 2 * (n - 1);
  i = i % period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

/// Separable Gaussian blur with reflect-101 borders. sigma <= 0 is a copy.
template <typename Scalar>
Raster<Scalar> gaussian_blur(const Raster<Scalar>& src, Scalar sigma) {
  if (!(sigma > Scalar(0))) return src;
  const auto kernel = gaussian_kernel(sigma);
  const Eigen::Index radius = (kernel.size() - 1) / 2;
  const Eigen::Index rows = src.rows(), cols = src.cols();

  Raster<Scalar> tmp(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y)
    for (Eigen::Index x = 0; x < cols; ++x) {
      Scalar acc = 0;
      for (Eigen::Index t = -radius; t <= radius; ++t)
        acc += kernel[t + radius] * src(y, reflect_index(x + t, cols));
      tmp(y, x) = acc;
    }
  Raster<Scalar> out(rows, cols);
  for (Eigen::Index x = 0; x < cols; ++x)
    for (Eigen::Index y = 0; y < rows; ++y) {
      Scalar acc = 0;
      for (Eigen::Index t = -radius; t <= radius; ++t)
        acc += kernel[t + radius] * tmp(reflect_index(y + t, rows), x);
      out(y, x) = acc;
    }
  return out;
}

/// Keep every second sample; new side is floor(side / 2).
template <typename Scalar>
Raster<Scalar> downsample_half(const Raster<Scalar>& src) {
  const Eigen::Index rows = src.rows() / 2, cols = src.cols() / 2;
  Raster<Scalar> out(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y)
    for (Eigen::Index x = 0; x < cols; ++x) out(y, x) = src(2 * y, 2 * x);
  return out;
}

template <typename Scalar>
struct Octave {
  std::vector<Raster<Scalar>> gaussians;  // scales_per_octave + 2 layers
  std::vector<Raster<Scalar>> dogs;       // adjacent differences, one fewer
};

/// Gaussian/DoG pyramid. Layer l of octave o is blurred to
/// base_sigma * 2^o * k^l with k = 2^(1/scales_per_octave).
template <typename Scalar>
struct ScaleSpace {
  std::vector<Octave<Scalar>> octaves;
  int scales_per_octave = 3;
  Scalar base_sigma = Scalar(1.6);

  Scalar layer_step() const {
    return static_cast<Scalar>(std::pow(2.0, 1.0 / scales_per_octave));
  }

  Scalar sigma_at(int octave, Scalar layer) const {
    const double k = std::pow(2.0, 1.0 / scales_per_octave);
    return static_cast<Scalar>(static_cast<double>(base_sigma) *
                               std::pow(2.0, octave) *
                               std::pow(k, static_cast<double>(layer)));
  }
};

// Nominal blur already present in the input raster before any processing.
template <typename Scalar>
inline constexpr Scalar kAssumedInputSigma = Scalar(0.5);

template <typename Scalar>
ScaleSpace<Scalar> build_scale_space(const Raster<Scalar>& image,
                                     int octave_count, int scales_per_octave,
                                     Scalar base_sigma) {
  if (octave_count < 1) throw std::invalid_argument("octave_count must be >= 1");
  if (scales_per_octave < 2)
    throw std::invalid_argument("scales_per_octave must be >= 2");
  if (!(base_sigma > Scalar(0)))
    throw std::invalid_argument("base_sigma must be positive");
  const Eigen::Index side = std::min(image.rows(), image.cols());
  if (side < (Eigen::Index{1} << octave_count) * 4)
    throw std::invalid_argument("image too small for requested octave count");

  ScaleSpace<Scalar> space;
  space.scales_per_octave = scales_per_octave;
  space.base_sigma = base_sigma;

  const int layers = scales_per_octave + 2;
  const double k = std::pow(2.0, 1.0 / scales_per_octave);

  // Lift the input to base_sigma, then blur incrementally layer to layer.
  const double s0 = static_cast<double>(base_sigma);
  const double si = static_cast<double>(kAssumedInputSigma<Scalar>);
  Raster<Scalar> base =
      s0 > si ? gaussian_blur(image, static_cast<Scalar>(
                                         std::sqrt(s0 * s0 - si * si)))
              : image;

  for (int o = 0; o < octave_count; ++o) {
    Octave<Scalar> octave;
    octave.gaussians.reserve(static_cast<std::size_t>(layers));
    octave.gaussians.push_back(std::move(base));
    for (int l = 1; l < layers; ++l) {
      const double prev = s0 * std::pow(k, l - 1);
      const double next = s0 * std::pow(k, l);
      const auto delta =
          static_cast<Scalar>(std::sqrt(next * next - prev * prev));
      octave.gaussians.push_back(gaussian_blur(octave.gaussians.back(), delta));
    }
    octave.dogs.reserve(static_cast<std::size_t>(layers - 1));
    for (int l = 0; l + 1 < layers; ++l)
      octave.dogs.push_back(octave.gaussians[static_cast<std::size_t>(l) + 1] -
                            octave.gaussians[static_cast<std::size_t>(l)]);
    // Layer scales_per_octave sits at 2 * base_sigma; halving it seeds the
    // next octave back at base_sigma.
    if (o + 1 < octave_count)
      base = downsample_half(
          octave.gaussians[static_cast<std::size_t>(scales_per_octave)]);
    space.octaves.push_back(std::move(octave));
  }
  return space;
}

template <typename Scalar>
ScaleSpace<Scalar> build_scale_space(const IrisImage<Scalar>& image,
                                     int octave_count, int scales_per_octave,
                                     Scalar base_sigma) {
  return build_scale_space(image.pixels(), octave_count, scales_per_octave,
                           base_sigma);
}

}  // namespace strata::sift
