#include "sdecert/model.hpp"

#include "sdecert/error.hpp"

namespace sdecert {

void SdeModel::diffusion_diagonal_derivative_into(ConstVecRef, VecRef) const {
  throw Error(name() + ": diffusion derivative not available");
}

double SdeModel::density_unnormalized(ConstVecRef) const {
  throw Error(name() + ": model has no analytic invariant density");
}

void SdeModel::check_state(ConstVecRef x) const {
  if (x.size() != dim()) {
    throw DimensionError(name() + ": state has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(dim()));
  }
}

StateVec SdeModel::drift(ConstVecRef x) const {
  check_state(x);
  StateVec out(dim());
  drift_into(x, out);
  return out;
}

Eigen::MatrixXd SdeModel::diffusion(ConstVecRef x) const {
  check_state(x);
  Eigen::MatrixXd out(dim(), noise_dim());
  diffusion_into(x, out);
  return out;
}

double SdeModel::analytic_density(ConstVecRef x) const {
  check_state(x);
  if (!has_analytic_density()) {
    throw Error(name() + ": model has no analytic invariant density");
  }
  return density_unnormalized(x);
}

}  // namespace sdecert
