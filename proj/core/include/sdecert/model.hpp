#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace sdecert {

using StateVec = Eigen::VectorXd;
using VecRef = Eigen::Ref<Eigen::VectorXd>;
using ConstVecRef = Eigen::Ref<const Eigen::VectorXd>;
using MatRef = Eigen::Ref<Eigen::MatrixXd>;
using ParamMap = std::map<std::string, double>;

/// dX = f(X) dt + σ(X) dW with X in R^n and W in R^m.
///
/// Implementations are immutable after construction, so one instance may be
/// shared by any number of worker threads. The `*_into` hooks are the unchecked
/// hot-path interface; the public wrappers validate dimensions.
class SdeModel {
 public:
  virtual ~SdeModel() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual Eigen::Index noise_dim() const = 0;
  virtual ParamMap params() const = 0;

  virtual void drift_into(ConstVecRef x, VecRef out) const = 0;
  virtual void diffusion_into(ConstVecRef x, MatRef out) const = 0;

  /// True when σ does not depend on the state.
  virtual bool constant_diffusion() const = 0;

  /// ∂σ_ii/∂x_i for diagonal noise (n == m, σ diagonal). Only needed by the
  /// Milstein correction for state-dependent diffusion.
  virtual void diffusion_diagonal_derivative_into(ConstVecRef x, VecRef out) const;
  virtual bool has_diffusion_derivative() const { return false; }

  virtual bool has_analytic_density() const { return false; }
  /// Unnormalized invariant density.
  virtual double density_unnormalized(ConstVecRef x) const;

  /// A point that lies close to the attractor; used to start long runs.
  virtual StateVec default_initial_state() const { return StateVec::Zero(dim()); }

  StateVec drift(ConstVecRef x) const;
  Eigen::MatrixXd diffusion(ConstVecRef x) const;
  double analytic_density(ConstVecRef x) const;

  void check_state(ConstVecRef x) const;
};

using ModelPtr = std::shared_ptr<const SdeModel>;

}  // namespace sdecert
