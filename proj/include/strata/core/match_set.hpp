#pragma once

#include <Eigen/Dense>
#include <optional>
#include <unordered_set>
#include <vector>

namespace strata {

enum class Stratum { R, Rinter, Rnew };

inline const char* stratum_name(Stratum s) {
  switch (s) {
    case Stratum::R:
      return "R";
    case Stratum::Rinter:
      return "Rinter";
    case Stratum::Rnew:
      return "Rnew";
  }
  return "?";
}

/// Pairing of gallery keypoint i with probe keypoint j. gamma (rotation
/// gradient, degrees) and psi (local scaling factor) stay unpopulated until
/// Strata II / III run.
template <typename Scalar = float>
struct MatchPair {
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  Scalar descriptor_distance = 0;
  std::optional<Scalar> gamma;
  std::optional<Scalar> psi;
};

template <typename Scalar = float>
struct MatchSet {
  std::vector<MatchPair<Scalar>> pairs;
  Stratum stratum = Stratum::R;

  Eigen::Index eta() const { return static_cast<Eigen::Index>(pairs.size()); }
};

using MatchPairF = MatchPair<float>;
using MatchSetF = MatchSet<float>;

/// One-to-one check: no gallery or probe index appears twice.
template <typename Scalar>
bool is_one_to_one(const MatchSet<Scalar>& set) {
  std::unordered_set<Eigen::Index> gallery, probe;
  for (const auto& p : set.pairs) {
    if (!gallery.insert(p.i).second || !probe.insert(p.j).second) return false;
  }
  return true;
}

}  // namespace strata
