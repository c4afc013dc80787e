#include "sdecert/box.hpp"

#include <utility>

#include "sdecert/error.hpp"

namespace sdecert {

OmegaBox::OmegaBox(StateVec lower, StateVec upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size() || lower_.size() == 0) {
    throw DimensionError("omega box: bounds must be nonempty and of equal length");
  }
  if (!(lower_.array() < upper_.array()).all() || !lower_.allFinite() || !upper_.allFinite()) {
    throw Error("omega box: lower bounds must be finite and strictly below upper bounds");
  }
}

OmegaBox OmegaBox::cube(Eigen::Index dim, double lower, double upper) {
  return OmegaBox(StateVec::Constant(dim, lower), StateVec::Constant(dim, upper));
}

OmegaBox OmegaBox::product(const OmegaBox& a, const OmegaBox& b) {
  StateVec lo(a.dim() + b.dim());
  StateVec hi(a.dim() + b.dim());
  lo << a.lower(), b.lower();
  hi << a.upper(), b.upper();
  return OmegaBox(std::move(lo), std::move(hi));
}

bool OmegaBox::contains(ConstVecRef x) const {
  return x.size() == dim() && (x.array() >= lower_.array()).all() && (x.array() <= upper_.array()).all();
}

void OmegaBox::sample_uniform(NoiseStream& stream, VecRef out) const {
  for (Eigen::Index i = 0; i < dim(); ++i) {
    out[i] = lower_[i] + (upper_[i] - lower_[i]) * stream.uniform();
  }
}

}  // namespace sdecert
