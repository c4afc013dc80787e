#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "sdecert/model.hpp"

namespace sdecert {

/// Gradient flow of V(x,y) = (x²+y²−1)² plus a unit rotation, additive noise σ·I₂.
class RingModel final : public SdeModel {
 public:
  explicit RingModel(double sigma = 0.5);

  std::string name() const override { return "ring"; }
  Eigen::Index dim() const override { return 2; }
  Eigen::Index noise_dim() const override { return 2; }
  ParamMap params() const override { return {{"sigma", sigma_}}; }

  void drift_into(ConstVecRef x, VecRef out) const override;
  void diffusion_into(ConstVecRef x, MatRef out) const override;
  bool constant_diffusion() const override { return true; }

  bool has_analytic_density() const override { return true; }
  /// exp(−2V/σ²)
  double density_unnormalized(ConstVecRef x) const override;
  StateVec default_initial_state() const override;

  static double potential(double x, double y) noexcept;
  /// K = π ∫_{−1}^{∞} exp(−2t²/σ²) dt, the normalizer of exp(−2V/σ²) over R².
  double normalizer() const;
  double sigma() const noexcept { return sigma_; }

 private:
  double sigma_;
};

/// 1-D gradient flow of an asymmetric double well with quadratic tails.
/// The left well is squeezed by the factor r; V is C¹ at x = 4, 0 and −4/r.
class DoubleWellModel final : public SdeModel {
 public:
  DoubleWellModel(double r = 5.0, double sigma = 1.2);

  std::string name() const override { return "double-well"; }
  Eigen::Index dim() const override { return 1; }
  Eigen::Index noise_dim() const override { return 1; }
  ParamMap params() const override { return {{"r", r_}, {"sigma", sigma_}}; }

  void drift_into(ConstVecRef x, VecRef out) const override;
  void diffusion_into(ConstVecRef x, MatRef out) const override;
  bool constant_diffusion() const override { return true; }

  bool has_analytic_density() const override { return true; }
  /// Gibbs form exp(−2V/σ²).
  double density_unnormalized(ConstVecRef x) const override;
  StateVec default_initial_state() const override;

  double potential(double x) const noexcept;
  double potential_derivative(double x) const noexcept;

 private:
  double r_;
  double sigma_;
};

/// Potential energy U for Langevin dynamics.
class Potential {
 public:
  virtual ~Potential() = default;
  virtual std::string name() const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual double value(ConstVecRef x) const = 0;
  virtual void gradient_into(ConstVecRef x, VecRef out) const = 0;
  virtual StateVec default_position() const { return StateVec::Zero(dim()); }
};

/// U(X) = (|X|²−1)² in the plane.
class RingPotential final : public Potential {
 public:
  std::string name() const override { return "ring"; }
  Eigen::Index dim() const override { return 2; }
  double value(ConstVecRef x) const override;
  void gradient_into(ConstVecRef x, VecRef out) const override;
  StateVec default_position() const override;
};

/// U(X) = ½ k |X|².
class HarmonicPotential final : public Potential {
 public:
  HarmonicPotential(Eigen::Index dim, double stiffness) : dim_(dim), k_(stiffness) {}
  std::string name() const override { return "harmonic"; }
  Eigen::Index dim() const override { return dim_; }
  double value(ConstVecRef x) const override { return 0.5 * k_ * x.squaredNorm(); }
  void gradient_into(ConstVecRef x, VecRef out) const override { out = k_ * x; }

 private:
  Eigen::Index dim_;
  double k_;
};

/// Underdamped Langevin dynamics dX = V dt, dV = −∇U(X) dt − γV dt + σ dW, γ ≥ 0.
///
/// State layout is [X; V]; the noise only enters the velocity block, so the
/// diffusion matrix is (2d × d) and not invertible.
class LangevinModel final : public SdeModel {
 public:
  LangevinModel(std::shared_ptr<const Potential> potential, double gamma = 1.0, double sigma = 0.5);

  std::string name() const override { return "langevin-" + potential_->name(); }
  Eigen::Index dim() const override { return 2 * spatial_dim(); }
  Eigen::Index noise_dim() const override { return spatial_dim(); }
  ParamMap params() const override { return {{"gamma", gamma_}, {"sigma", sigma_}}; }

  void drift_into(ConstVecRef x, VecRef out) const override;
  void diffusion_into(ConstVecRef x, MatRef out) const override;
  bool constant_diffusion() const override { return true; }

  bool has_analytic_density() const override { return true; }
  /// exp(−β(|V|²/2 + U(X))) with β = 2γ/σ².
  double density_unnormalized(ConstVecRef x) const override;
  StateVec default_initial_state() const override;

  Eigen::Index spatial_dim() const { return potential_->dim(); }
  double gamma() const noexcept { return gamma_; }
  double sigma() const noexcept { return sigma_; }
  const Potential& potential() const noexcept { return *potential_; }

 private:
  std::shared_ptr<const Potential> potential_;
  double gamma_;
  double sigma_;
};

/// Lorenz-96 with cyclic indices and additive noise σ·I_D.
class Lorenz96Model final : public SdeModel {
 public:
  Lorenz96Model(int dimension = 4, double forcing = 8.0, double sigma = 3.0);

  std::string name() const override { return "lorenz96"; }
  Eigen::Index dim() const override { return dim_; }
  Eigen::Index noise_dim() const override { return dim_; }
  ParamMap params() const override;

  void drift_into(ConstVecRef x, VecRef out) const override;
  void diffusion_into(ConstVecRef x, MatRef out) const override;
  bool constant_diffusion() const override { return true; }
  StateVec default_initial_state() const override;

 private:
  Eigen::Index dim_;
  double forcing_;
  double sigma_;
};

/// Ring of N FitzHugh–Nagumo neurons with nearest-neighbour coupling d_u and
/// mean-field coupling w, written in the rescaled recovery variable.
/// State layout is [u_1..u_N, v_1..v_N]; every coordinate gets its own noise.
class FitzHughNagumoModel final : public SdeModel {
 public:
  struct Params {
    int neurons = 2;
    double mu = 0.1;
    double d_u = 0.03;
    double w = 0.3;
    double sigma = 0.6;
    double a = 1.05;
  };

  explicit FitzHughNagumoModel(Params p);

  std::string name() const override { return "fhn"; }
  Eigen::Index dim() const override { return 2 * p_.neurons; }
  Eigen::Index noise_dim() const override { return 2 * p_.neurons; }
  ParamMap params() const override;

  void drift_into(ConstVecRef x, VecRef out) const override;
  void diffusion_into(ConstVecRef x, MatRef out) const override;
  bool constant_diffusion() const override { return true; }
  StateVec default_initial_state() const override;

 private:
  Params p_;
  double inv_mu_;
  double inv_sqrt_mu_;
};

/// Model assembled from callables, for user-defined systems.
class FunctionModel final : public SdeModel {
 public:
  using DriftFn = std::function<void(ConstVecRef, VecRef)>;
  using DiffusionFn = std::function<void(ConstVecRef, MatRef)>;
  using DerivativeFn = std::function<void(ConstVecRef, VecRef)>;
  using DensityFn = std::function<double(ConstVecRef)>;

  struct Spec {
    std::string name = "custom";
    Eigen::Index dim = 1;
    Eigen::Index noise_dim = 1;
    DriftFn drift;
    DiffusionFn diffusion;
    bool constant_diffusion = false;
    DerivativeFn diffusion_diagonal_derivative;
    DensityFn density;
    ParamMap params;
  };

  explicit FunctionModel(Spec spec);

  std::string name() const override { return spec_.name; }
  Eigen::Index dim() const override { return spec_.dim; }
  Eigen::Index noise_dim() const override { return spec_.noise_dim; }
  ParamMap params() const override { return spec_.params; }

  void drift_into(ConstVecRef x, VecRef out) const override { spec_.drift(x, out); }
  void diffusion_into(ConstVecRef x, MatRef out) const override { spec_.diffusion(x, out); }
  bool constant_diffusion() const override { return spec_.constant_diffusion; }
  void diffusion_diagonal_derivative_into(ConstVecRef x, VecRef out) const override;
  bool has_diffusion_derivative() const override { return static_cast<bool>(spec_.diffusion_diagonal_derivative); }
  bool has_analytic_density() const override { return static_cast<bool>(spec_.density); }
  double density_unnormalized(ConstVecRef x) const override;

 private:
  Spec spec_;
};

/// dX = −θX dt + σ dW in one dimension.
ModelPtr make_ornstein_uhlenbeck(double theta, double sigma);

}  // namespace sdecert
