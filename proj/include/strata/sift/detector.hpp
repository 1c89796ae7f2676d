#pragma once

<
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "strata/core/config.hpp"
#include "strata/core/image.hpp"
#include "strata/core/keypoint.hpp"
#include "strata/sift/scale_space.hpp"

namespace strata::sift {

/// Refined scale-space extremum. (x, y, sigma) are base-image coordinates;
/// (ox, oy, layer) locate the same point inside its octave, which the
/// orientation and descriptor stages sample from.
template <typename Scalar>
struct Candidate {
  Scalar x = 0, y = 0, sigma = 0;
  int octave = 0;
  Scalar ox = 0, oy = 0, layer = 0;
};

template <typename Scalar>
struct OrientedCandidate {
  Candidate<Scalar> pos;
  Scalar orientation = 0;  // degrees [0, 360)
};

namespace detail {

template <typename Scalar>
bool is_extremum_26(const Octave<Scalar>& oct, int l, Eigen::Index y,
                    Eigen::Index x) {
  const Scalar v = oct.dogs[static_cast<std::size_t>(l)](y, x);
  bool is_max = true, is_min = true;
  for (int dl = -1; dl <= 1; ++dl) {
    const auto& layer = oct.dogs[static_cast<std::size_t>(l + dl)];
    for (Eigen::Index dy = -1; dy <= 1; ++dy)
      for (Eigen::Index dx = -1; dx <= 1; ++dx) {
        if (dl == 0 && dy == 0 && dx == 0) continue;
        const Scalar n = layer(y + dy, x + dx);
        if (v <= n) is_max = false;
        if (v >= n) is_min = false;
        if (!is_max && !is_min) return false;
      }
  }
  return is_max || is_min;
}

/// Gradient and Hessian of the DoG stack at an interior sample.
template <typename Scalar>
void dog_derivatives(const Octave<Scalar>& oct, int l, Eigen::Index y,
                     Eigen::Index x, Eigen::Matrix<Scalar, 3, 1>& grad,
                     Eigen::Matrix<Scalar, 3, 3>& hess) {
  const auto& d0 = oct.dogs[static_cast<std::size_t>(l - 1)];
  const auto& d1 = oct.dogs[static_cast<std::size_t>(l)];
  const auto& d2 = oct.dogs[static_cast<std::size_t>(l + 1)];
  const Scalar v = d1(y, x);

  grad[0] = (d1(y, x + 1) - d1(y, x - 1)) / Scalar(2);
  grad[1] = (d1(y + 1, x) - d1(y - 1, x)) / Scalar(2);
  grad[2] = (d2(y, x) - d0(y, x)) / Scalar(2);

  const Scalar dxx = d1(y, x + 1) + d1(y, x - 1) - 2 * v;
  const Scalar dyy = d1(y + 1, x) + d1(y - 1, x) - 2 * v;
  const Scalar dss = d2(y, x) + d0(y, x) - 2 * v;
  const Scalar dxy = (d1(y + 1, x + 1) + d1(y - 1, x - 1) - d1(y + 1, x - 1) -
                      d1(y - 1, x + 1)) /
                     Scalar(4);
  const Scalar dxs =
      (d2(y, x + 1) + d0(y, x - 1) - d2(y, x - 1) - d0(y, x + 1)) / Scalar(4);
  const Scalar dys =
      (d2(y + 1, x) + d0(y - 1, x) - d2(y - 1, x) - d0(y + 1, x)) / Scalar(4);

  hess << dxx, dxy, dxs, dxy, dyy, dys, dxs, dys, dss;
}

}  // namespace detail

/// DoG extrema over the 3x3x3 neighborhood, quadratically refined, with the
/// interpolated contrast and principal-curvature tests applied. Coordinates
/// come back in base-image pixels.
template <typename Scalar>
std::vector<Candidate<Scalar>> detect_keypoints(const ScaleSpace<Scalar>& space,
                                                Scalar contrast_threshold,
                                                Scalar edge_ratio_threshold) {
  constexpr int kMaxRefineSteps = 5;
  std::vector<Candidate<Scalar>> out;

  for (int o = 0; o < static_cast<int>(space.octaves.size()); ++o) {
    const auto& oct = space.octaves[static_cast<std::size_t>(o)];
    const int dog_count = static_cast<int>(oct.dogs.size());
    if (dog_count < 3) continue;
    const Eigen::Index rows = oct.dogs[0].rows(), cols = oct.dogs[0].cols();
    if (rows < 3 || cols < 3) continue;

    // One candidate per converged lattice cell.
    std::vector<bool> claimed(static_cast<std::size_t>(dog_count) *
                                  static_cast<std::size_t>(rows * cols),
                              false);
    const auto cell = [&](int l, Eigen::Index y, Eigen::Index x) {
      return (static_cast<std::size_t>(l) * static_cast<std::size_t>(rows) +
              static_cast<std::size_t>(y)) *
                 static_cast<std::size_t>(cols) +
             static_cast<std::size_t>(x);
    };

    for (int l = 1; l + 1 < dog_count; ++l)
      for (Eigen::Index y = 1; y + 1 < rows; ++y)
        for (Eigen::Index x = 1; x + 1 < cols; ++x) {
          if (!detail::is_extremum_26(oct, l, y, x)) continue;

          int cl = l;
          Eigen::Index cy = y, cx = x;
          Eigen::Matrix<Scalar, 3, 1> grad, offset;
          Eigen::Matrix<Scalar, 3, 3> hess;
          bool converged = false;
          for (int step = 0; step < kMaxRefineSteps; ++step) {
            detail::dog_derivatives(oct, cl, cy, cx, grad, hess);
            const Scalar det = hess.determinant();
            if (!(std::abs(det) > Scalar(1e-20))) break;
            offset = -hess.inverse() * grad;
            if (!offset.array().isFinite().all()) break;
            if (std::abs(offset[0]) <= Scalar(0.5) &&
                std::abs(offset[1]) <= Scalar(0.5) &&
                std::abs(offset[2]) <= Scalar(0.5)) {
              converged = true;
              break;
            }
            cx += static_cast<Eigen::Index>(std::lround(offset[0]));
            cy += static_cast<Eigen::Index>(std::lround(offset[1]));
            cl += static_cast<int>(std::lround(offset[2]));
            if (cl < 1 || cl + 1 >= dog_count || cy < 1 || cy + 1 >= rows ||
                cx < 1 || cx + 1 >= cols) {
              converged = false;
              break;
            }
          }
          if (!converged) continue;
          if (claimed[cell(cl, cy, cx)]) continue;

          const Scalar refined =
              oct.dogs[static_cast<std::size_t>(cl)](cy, cx) +
              grad.dot(offset) / Scalar(2);
          if (std::abs(refined) < contrast_threshold) continue;

          // Principal-curvature (edge) rejection on the spatial Hessian.
          const Scalar tr = hess(0, 0) + hess(1, 1);
          const Scalar det2 = hess(0, 0) * hess(1, 1) - hess(0, 1) * hess(0, 1);
          const Scalar r = edge_ratio_threshold;
          if (det2 <= Scalar(0)) continue;
          if (tr * tr * r >= (r + 1) * (r + 1) * det2) continue;

          claimed[cell(cl, cy, cx)] = true;

          Candidate<Scalar> cand;
          cand.octave = o;
          cand.ox = static_cast<Scalar>(cx) + offset[0];
          cand.oy = static_cast<Scalar>(cy) + offset[1];
          cand.layer = static_cast<Scalar>(cl) + offset[2];
          const Scalar scale = static_cast<Scalar>(1 << o);
          cand.x = cand.ox * scale;
          cand.y = cand.oy * scale;
          cand.sigma = space.sigma_at(o, cand.layer);
          out.push_back(cand);
        }
  }
  return out;
}

namespace detail {

constexpr int kOrientationBins = 36;

template <typename Scalar>
const Raster<Scalar>& gaussian_layer_for(const ScaleSpace<Scalar>& space,
                                         const Candidate<Scalar>& cand) {
  const auto& oct = space.octaves[static_cast<std::size_t>(cand.octave)];
  const int idx = std::clamp(
      static_cast<int>(std::lround(static_cast<double>(cand.layer))), 0,
      static_cast<int>(oct.gaussians.size()) - 1);
  return oct.gaussians[static_cast<std::size_t>(idx)];
}

/// Scale of the candidate expressed in its own octave's pixels.
template <typename Scalar>
Scalar local_sigma(const ScaleSpace<Scalar>& space,
                   const Candidate<Scalar>& cand) {
  return space.sigma_at(0, cand.layer);
}

template <typename Scalar>
Scalar peak_offset(Scalar left, Scalar center, Scalar right) {
  const Scalar denom = left - 2 * center + right;
  if (std::abs(denom) < Scalar(1e-12)) return Scalar(0);
  Scalar off = (left - right) / (2 * denom);
  return std::clamp(off, Scalar(-0.5), Scalar(0.5));
}

}  // namespace detail

/// Gaussian-weighted 36-bin gradient-orientation histogram around the
/// candidate; one oriented stub per peak within 80% of the maximum. Returns
/// nothing when the window leaves the raster (the candidate is dropped).
template <typename Scalar>
std::vector<OrientedCandidate<Scalar>> assign_orientation(
    const ScaleSpace<Scalar>& space, const Candidate<Scalar>& cand) {
  using std::numbers::pi;
  const auto& img = detail::gaussian_layer_for(space, cand);
  const Scalar sigma_w = Scalar(1.5) * detail::local_sigma(space, cand);
  const int radius = std::max(1, static_cast<int>(std::lround(3.0 * sigma_w)));

  const auto x0 = static_cast<Eigen::Index>(std::floor(cand.ox)) - radius;
  const auto x1 = static_cast<Eigen::Index>(std::ceil(cand.ox)) + radius;
  const auto y0 = static_cast<Eigen::Index>(std::floor(cand.oy)) - radius;
  const auto y1 = static_cast<Eigen::Index>(std::ceil(cand.oy)) + radius;
  if (x0 < 1 || y0 < 1 || x1 + 1 >= img.cols() || y1 + 1 >= img.rows())
    return {};

  constexpr int nbins = detail::kOrientationBins;
  Eigen::Matrix<Scalar, nbins, 1> hist = Eigen::Matrix<Scalar, nbins, 1>::Zero();
  const Scalar two_sigma_sq = 2 * sigma_w * sigma_w;
  for (Eigen::Index y = y0; y <= y1; ++y)
    for (Eigen::Index x = x0; x <= x1; ++x) {
      const Scalar dx = static_cast<Scalar>(x) - cand.ox;
      const Scalar dy = static_cast<Scalar>(y) - cand.oy;
      const Scalar gx = img(y, x + 1) - img(y, x - 1);
      const Scalar gy = img(y + 1, x) - img(y - 1, x);
      const Scalar mag = std::sqrt(gx * gx + gy * gy);
      if (!(mag > Scalar(0))) continue;
      const Scalar w =
          std::exp(-(dx * dx + dy * dy) / two_sigma_sq);
      Scalar ang = std::atan2(gy, gx);
      if (ang < Scalar(0)) ang += Scalar(2 * pi);
      int bin = static_cast<int>(ang / Scalar(2 * pi) * nbins);
      if (bin >= nbins) bin = 0;
      hist[bin] += w * mag;
    }
  if (!(hist.sum() > Scalar(0))) return {};

  // Two circular box-smoothing passes stabilize the peaks.
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::Matrix<Scalar, nbins, 1> s;
    for (int b = 0; b < nbins; ++b)
      s[b] = (hist[(b + nbins - 1) % nbins] + hist[b] +
              hist[(b + 1) % nbins]) /
             Scalar(3);
    hist = s;
  }

  const Scalar peak_max = hist.maxCoeff();
  const Scalar bin_width = Scalar(360) / nbins;
  std::vector<OrientedCandidate<Scalar>> stubs;
  for (int b = 0; b < nbins; ++b) {
    const Scalar left = hist[(b + nbins - 1) % nbins];
    const Scalar right = hist[(b + 1) % nbins];
    if (hist[b] < Scalar(0.8) * peak_max) continue;
    if (!(hist[b] > left && hist[b] > right)) continue;
    const Scalar off = detail::peak_offset(left, hist[b], right);
    Scalar deg = (static_cast<Scalar>(b) + Scalar(0.5) + off) * bin_width;
    deg = std::fmod(deg + Scalar(360), Scalar(360));
    stubs.push_back({cand, deg});
  }
  if (stubs.empty()) {
    // Near-uniform histogram (e.g. a rotationally symmetric blob): no strict
    // local maximum exists, keep the global argmax.
    int b = 0;
    hist.maxCoeff(&b);
    Scalar deg = (static_cast<Scalar>(b) + Scalar(0.5)) * bin_width;
    deg = std::fmod(deg, Scalar(360));
    stubs.push_back({cand, deg});
  }
  return stubs;
}

/// 4x4 spatial grid x 8 orientation bins sampled from a window rotated by
/// the keypoint orientation; clamped at 0.2 and re-normalized. Returns
/// nothing when the window leaves the raster.
template <typename Scalar>
std::optional<Keypoint<Scalar>> compute_descriptor(
    const ScaleSpace<Scalar>& space, const OrientedCandidate<Scalar>& stub) {
  using std::numbers::pi;
  constexpr int kGrid = 4;
  constexpr int kBins = 8;
  const auto& img = detail::gaussian_layer_for(space, stub.pos);
  const Scalar spacing = Scalar(3) * detail::local_sigma(space, stub.pos);
  const Scalar radius_f = spacing * Scalar(kGrid + 1) / Scalar(2) *
                          static_cast<Scalar>(std::numbers::sqrt2);
  const int radius = std::max(1, static_cast<int>(std::lround(
                                     static_cast<double>(radius_f))));

  const auto x0 = static_cast<Eigen::Index>(std::floor(stub.pos.ox)) - radius;
  const auto x1 = static_cast<Eigen::Index>(std::ceil(stub.pos.ox)) + radius;
  const auto y0 = static_cast<Eigen::Index>(std::floor(stub.pos.oy)) - radius;
  const auto y1 = static_cast<Eigen::Index>(std::ceil(stub.pos.oy)) + radius;
  if (x0 < 1 || y0 < 1 || x1 + 1 >= img.cols() || y1 + 1 >= img.rows())
    return std::nullopt;

  const Scalar theta = stub.orientation * Scalar(pi) / Scalar(180);
  const Scalar ct = std::cos(theta), st = std::sin(theta);

  Eigen::Matrix<Scalar, kDescriptorSize, 1> desc =
      Eigen::Matrix<Scalar, kDescriptorSize, 1>::Zero();
  for (Eigen::Index y = y0; y <= y1; ++y)
    for (Eigen::Index x = x0; x <= x1; ++x) {
      const Scalar dx = static_cast<Scalar>(x) - stub.pos.ox;
      const Scalar dy = static_cast<Scalar>(y) - stub.pos.oy;
      // Rotate into the descriptor frame, measured in subregion units.
      const Scalar rx = (ct * dx + st * dy) / spacing;
      const Scalar ry = (-st * dx + ct * dy) / spacing;
      const Scalar xbin = rx + Scalar(kGrid) / 2 - Scalar(0.5);
      const Scalar ybin = ry + Scalar(kGrid) / 2 - Scalar(0.5);
      if (xbin <= Scalar(-1) || xbin >= Scalar(kGrid) || ybin <= Scalar(-1) ||
          ybin >= Scalar(kGrid))
        continue;

      const Scalar gx = img(y, x + 1) - img(y, x - 1);
      const Scalar gy = img(y + 1, x) - img(y - 1, x);
      const Scalar mag = std::sqrt(gx * gx + gy * gy);
      if (!(mag > Scalar(0))) continue;
      Scalar ang = std::atan2(gy, gx) - theta;
      ang = std::fmod(ang, Scalar(2 * pi));
      if (ang < Scalar(0)) ang += Scalar(2 * pi);
      const Scalar obin = ang / Scalar(2 * pi) * kBins;
      const Scalar w = std::exp(-(rx * rx + ry * ry) /
                                (2 * Scalar(kGrid) / 2 * Scalar(kGrid) / 2));

      const int xi0 = static_cast<int>(std::floor(xbin));
      const int yi0 = static_cast<int>(std::floor(ybin));
      const int oi0 = static_cast<int>(std::floor(obin)) % kBins;
      const Scalar fx = xbin - std::floor(xbin);
      const Scalar fy = ybin - std::floor(ybin);
      const Scalar fo = obin - std::floor(obin);
      for (int a = 0; a < 2; ++a) {
        const int xi = xi0 + a;
        if (xi < 0 || xi >= kGrid) continue;
        for (int b = 0; b < 2; ++b) {
          const int yi = yi0 + b;
          if (yi < 0 || yi >= kGrid) continue;
          for (int c = 0; c < 2; ++c) {
            const int oi = (oi0 + c) % kBins;
            const Scalar weight = (a ? fx : 1 - fx) * (b ? fy : 1 - fy) *
                                  (c ? fo : 1 - fo);
            desc[(yi * kGrid + xi) * kBins + oi] += w * mag * weight;
          }
        }
      }
    }

  Scalar norm = desc.norm();
  if (!(norm > Scalar(0))) return std::nullopt;  // degenerate flat patch
  desc /= norm;
  desc = desc.cwiseMin(Scalar(0.2));  // illumination clamp
  norm = desc.norm();
  if (!(norm > Scalar(0))) return std::nullopt;
  desc /= norm;

  Keypoint<Scalar> kp;
  kp.x = stub.pos.x;
  kp.y = stub.pos.y;
  kp.sigma = stub.pos.sigma;
  kp.orientation = stub.orientation;
  kp.descriptor = desc;
  return kp;
}

/// Derive the largest octave count the raster supports, capped at 4.
inline int auto_octave_count(Eigen::Index side) {
  int count = 1;
  while (count < 4 && side >= (Eigen::Index{1} << (count + 1)) * 4) ++count;
  return count;
}

/// Full detection: scale space, extrema, orientation, descriptors. Output is
/// canonically ordered by (y, x, sigma, orientation) with exact duplicates
/// removed, so results are independent of traversal order.
template <typename Scalar>
KeypointSet<Scalar> detect(const IrisImage<Scalar>& image,
                           const DetectorParams& params = {}) {
  const int octaves = params.octave_count > 0
                          ? params.octave_count
                          : auto_octave_count(image.side());
  const auto space =
      build_scale_space(image.pixels(), octaves, params.scales_per_octave,
                        static_cast<Scalar>(params.base_sigma));
  const auto candidates = detect_keypoints(
      space, static_cast<Scalar>(params.contrast_threshold),
      static_cast<Scalar>(params.edge_ratio_threshold));

  KeypointSet<Scalar> set;
  set.source_image_id = image.id();
  const Scalar side = static_cast<Scalar>(image.side());
  for (const auto& cand : candidates) {
    if (!(cand.x >= Scalar(0) && cand.x < side && cand.y >= Scalar(0) &&
          cand.y < side))
      continue;
    for (const auto& stub : assign_orientation(space, cand))
      if (auto kp = compute_descriptor(space, stub))
        set.keypoints.push_back(std::move(*kp));
  }

  std::sort(set.keypoints.begin(), set.keypoints.end(),
            [](const Keypoint<Scalar>& a, const Keypoint<Scalar>& b) {
              if (a.y != b.y) return a.y < b.y;
              if (a.x != b.x) return a.x < b.x;
              if (a.sigma != b.sigma) return a.sigma < b.sigma;
              return a.orientation < b.orientation;
            });
  set.keypoints.erase(
      std::unique(set.keypoints.begin(), set.keypoints.end(),
                  [](const Keypoint<Scalar>& a, const Keypoint<Scalar>& b) {
                    return a.x == b.x && a.y == b.y && a.sigma == b.sigma &&
                           a.orientation == b.orientation;
                  }),
      set.keypoints.end());
  return set;
}

}  // namespace strata::sift
