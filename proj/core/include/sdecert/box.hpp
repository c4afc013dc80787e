#pragma once

#include "sdecert/model.hpp"
#include "sdecert/random.hpp"

namespace sdecert {

/// Axis-aligned box Ω = Π [lower_i, upper_i] with lower_i < upper_i.
class OmegaBox {
 public:
  OmegaBox() = default;
  OmegaBox(StateVec lower, StateVec upper);

  static OmegaBox cube(Eigen::Index dim, double lower, double upper);
  /// Cartesian product: `a` occupies the leading coordinates.
  static OmegaBox product(const OmegaBox& a, const OmegaBox& b);

  Eigen::Index dim() const noexcept { return lower_.size(); }
  const StateVec& lower() const noexcept { return lower_; }
  const StateVec& upper() const noexcept { return upper_; }
  StateVec width() const { return upper_ - lower_; }
  double volume() const { return width().prod(); }

  bool contains(ConstVecRef x) const;
  void sample_uniform(NoiseStream& stream, VecRef out) const;

  friend bool operator==(const OmegaBox& a, const OmegaBox& b) {
    return a.lower_.size() == b.lower_.size() && a.lower_ == b.lower_ && a.upper_ == b.upper_;
  }

 private:
  StateVec lower_;
  StateVec upper_;
};

}  // namespace sdecert
