#include "beliefsim/belief.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace beliefsim {

namespace {
// Upper bound on the computed norm of an exactly unit-length vector.
double norm_rounding_bound(std::size_t dims) {
    return 1.0 + static_cast<double>(dims + 4) * std::numeric_limits<double>::epsilon();
}
}  // namespace

double norm(std::span<const double> v) noexcept {
    double sum = 0.0;
    for (double c : v) sum += c * c;
    return std::sqrt(sum);
}

double distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("distance: dimension mismatch (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

BeliefVector clamp_to_unit_ball(const BeliefVector& v) {
    for (std::size_t i = 0; i < v.dims(); ++i) {
        if (!std::isfinite(v[i])) {
            throw std::invalid_argument("clamp_to_unit_ball: non-finite component");
        }
    }
    // A freshly normalized vector can have a computed norm a few ulps above 1;
    // those count as on the sphere so that clamping is idempotent.
    const double n = norm(v);
    if (n <= norm_rounding_bound(v.dims())) return v;
    BeliefVector out = v;
    for (std::size_t i = 0; i < out.dims(); ++i) out[i] = v[i] / n;
    return out;
}

bool is_valid_belief(std::span<const double> v) noexcept {
    for (double c : v) {
        if (!std::isfinite(c)) return false;
    }
    return norm(v) <= 1.0 + kUnitBallSlack;
}

void validate_belief(std::span<const double> v, const char* what) {
    for (double c : v) {
        if (!std::isfinite(c)) throw std::invalid_argument(std::string(what) + ": non-finite component");
    }
    if (norm(v) > 1.0 + kUnitBallSlack) {
        throw std::invalid_argument(std::string(what) + ": outside the unit ball (norm " +
                                    std::to_string(norm(v)) + ")");
    }
}

}  // namespace beliefsim
