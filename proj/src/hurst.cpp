#include "fracdrift/hurst.hpp"

#include <cmath>
#include <stdexcept>

namespace fracdrift {

std::string to_string(Regime regime) {
  return regime == Regime::Young ? "young" : "rough";
}

HurstParam::HurstParam(double h) : h_(h) {
  if (!(h > 1.0 / 3.0 && h < 1.0)) {
    throw std::invalid_argument("Hurst parameter must lie in (1/3, 1), got " +
                                std::to_string(h));
  }
}

double HurstParam::alpha_bar() const {
  return std::abs(alpha()) / (2.0 * h_ * (2.0 * h_ + 1.0));
}

}  // namespace fracdrift
