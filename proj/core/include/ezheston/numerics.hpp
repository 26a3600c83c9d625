#pragma once

#include <cmath>
#include <optional>
#include <utility>

namespace ezheston {

// Roots of a*x^2 + b*x + c = 0, computed without subtractive cancellation:
// q = -(b + sign(b)*sqrt(disc))/2, roots q/a and c/q. Returns nullopt when
// the discriminant is negative. With a == 0 the single root -c/b is
// duplicated. Roots are unordered.
inline std::optional<std::pair<double, double>>
stable_quadratic_roots(double a, double b, double c) {
    if (a == 0.0) {
        double x = -c / b;
        return std::make_pair(x, x);
    }
    double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return std::nullopt;
    double s = std::sqrt(disc);
    double q = (b >= 0.0) ? -0.5 * (b + s) : -0.5 * (b - s);
    if (q == 0.0) return std::make_pair(0.0, 0.0);
    return std::make_pair(q / a, c / q);
}

} // namespace ezheston
