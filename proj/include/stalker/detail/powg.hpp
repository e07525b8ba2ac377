#pragma once

#include <cmath>

namespace stalker::detail {

// x^(gamma+1), x^(1/(gamma+1)) and x^(-gamma) with fast paths for the
// exponents the experiments sweep; generic pow() otherwise.
inline double pow_gp1(double x, double gamma) {
    if (gamma == 1.0) return x * x;
    if (gamma == 2.0) return x * x * x;
    if (gamma == 0.5) return x * std::sqrt(x);
    return std::pow(x, gamma + 1.0);
}

inline double root_gp1(double r, double gamma) {
    if (gamma == 1.0) return std::sqrt(r);
    if (gamma == 2.0) return std::cbrt(r);
    if (gamma == 0.5) return std::cbrt(r * r);  // r^(2/3)
    return std::pow(r, 1.0 / (gamma + 1.0));
}

inline double pow_neg_g(double x, double gamma) {
    if (gamma == 1.0) return 1.0 / x;
    if (gamma == 2.0) return 1.0 / (x * x);
    if (gamma == 0.5) return 1.0 / std::sqrt(x);
    return std::pow(x, -gamma);
}

}  // namespace stalker::detail
