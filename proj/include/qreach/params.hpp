#pragma once

#include <stdexcept>

namespace qreach {

/// Physical constants of the driven qubit: transition frequency omega,
/// control coupling kappa and decoherence rate gamma.
template <typename Scalar = double>
class SystemParams {
 public:
  SystemParams(Scalar omega, Scalar kappa, Scalar gamma)
      : omega_(omega), kappa_(kappa), gamma_(gamma), ratio_(gamma / omega) {
    if (!(omega > 0)) throw std::invalid_argument("SystemParams: omega must be > 0");
    if (!(kappa > 0)) throw std::invalid_argument("SystemParams: kappa must be > 0");
    if (!(gamma >= 0)) throw std::invalid_argument("SystemParams: gamma must be >= 0");
  }

  /// Scaled units: omega = 1, 2 kappa = 1, gamma = ratio.
  static SystemParams scaled(Scalar ratio) { return SystemParams(Scalar(1), Scalar(0.5), ratio); }

  Scalar omega() const noexcept { return omega_; }
  Scalar kappa() const noexcept { return kappa_; }
  Scalar gamma() const noexcept { return gamma_; }
  /// gamma / omega, the only parameter of the rescaled auxiliary system.
  Scalar ratio() const noexcept { return ratio_; }

 private:
  Scalar omega_;
  Scalar kappa_;
  Scalar gamma_;
  Scalar ratio_;
};

using Params = SystemParams<double>;

}  // namespace qreach
