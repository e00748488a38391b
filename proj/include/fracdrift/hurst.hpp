#pragma once

#include <string>

namespace fracdrift {

/// Integration regime of the driving noise.
/// Young: H in (1/2, 1). Rough: H in (1/3, 1/2], H = 1/2 included.
enum class Regime { Young, Rough };

std::string to_string(Regime regime);

/// Hurst index of the driving fBm, restricted to (1/3, 1).
class HurstParam {
 public:
  explicit HurstParam(double h);

  double value() const { return h_; }
  Regime regime() const { return h_ > 0.5 ? Regime::Young : Regime::Rough; }

  /// alpha_H = H(2H - 1), weight of the kernel |t - s|^{2H-2}.
  double alpha() const { return h_ * (2.0 * h_ - 1.0); }

  /// |alpha_H| / (2H(2H + 1)), the constant of the contraction bound.
  double alpha_bar() const;

 private:
  double h_;
};

}  // namespace fracdrift
