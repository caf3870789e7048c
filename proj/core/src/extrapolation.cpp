#include "sll/extrapolation.hpp"

#include "sll/error.hpp"

#include <algorithm>
#include <cmath>

namespace sll {

ExtrapolatedValue richardson_triple(double coarse, double mid, double fine) {
    const double d1 = coarse - mid;
    const double d2 = mid - fine;
    ExtrapolatedValue out;
    out.value = fine;
    // Differences must be nonzero and of one sign.
    if (d1 == 0.0 || d2 == 0.0 || (d1 > 0.0) != (d2 > 0.0)) return out;
    const double p = std::clamp(std::log2(d1 / d2), kMinOrder, kMaxOrder);
    out.order = p;
    out.value = fine - d2 / (std::exp2(p) - 1.0);
    out.extrapolated = true;
    return out;
}

std::vector<ExtrapolatedValue> richardson_lists(const std::vector<double>& coarse, const std::vector<double>& mid,
                                                const std::vector<double>& fine) {
    const std::size_t n = std::min({coarse.size(), mid.size(), fine.size()});
    std::vector<ExtrapolatedValue> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = richardson_triple(coarse[i], mid[i], fine[i]);
    return out;
}

double extrapolate_linear_to_zero(double eps1, double v1, double eps2, double v2) {
    SLL_REQUIRE(eps1 != eps2, "extrapolation needs two distinct parameters");
    return (eps1 * v2 - eps2 * v1) / (eps1 - eps2);
}

} // namespace sll
