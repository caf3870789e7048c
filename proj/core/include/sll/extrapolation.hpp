#pragma once

#include <vector>

namespace sll {

inline constexpr double kMinOrder = 1.0;
inline constexpr double kMaxOrder = 6.0;

struct ExtrapolatedValue {
    double value = 0.0;
    double order = 0.0;     // observed order p, clamped to [1, 6]
    bool extrapolated = false; // false: non-monotone triple, finest value passed through
};

/// Richardson extrapolation from three values on meshes with h halving.
/// p = log2((f0 - f1) / (f1 - f2)); value f2 + (f2 - f1) / (2^p - 1).
ExtrapolatedValue richardson_triple(double coarse, double mid, double fine);

/// Index-wise extrapolation of three ascending eigenvalue lists (the common
/// prefix length is used).
std::vector<ExtrapolatedValue> richardson_lists(const std::vector<double>& coarse, const std::vector<double>& mid,
                                                const std::vector<double>& fine);

/// Linear extrapolation to eps = 0 from values at eps1 and eps2 (eps1 != eps2).
double extrapolate_linear_to_zero(double eps1, double v1, double eps2, double v2);

} // namespace sll
