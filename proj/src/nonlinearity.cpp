#include "nlsosc/nonlinearity.hpp"

#include "nlsosc/error.hpp"

#include <cmath>

namespace nlsosc {

Nonlinearity Nonlinearity::from_label(const std::string& label)
{
    if (label == "saturated") {
        return {label,
                [](double s) { return -s / (1.0 + s); },
                [](double s) { return -1.0 / ((1.0 + s) * (1.0 + s)); },
                [](double s) { return 2.0 / ((1.0 + s) * (1.0 + s) * (1.0 + s)); },
                [](double s) { return -(s - std::log1p(s)); }};
    }
    if (label == "saturated_quintic") {
        return {label,
                [](double s) { return -s * s * s / (1.0 + s * s); },
                [](double s) {
                    const double p = 1.0 + s * s;
                    return -(s * s * (3.0 + s * s)) / (p * p);
                },
                [](double s) {
                    const double p = 1.0 + s * s;
                    return -(2.0 * s * (3.0 - s * s)) / (p * p * p);
                },
                [](double s) { return -0.5 * (s * s - std::log1p(s * s)); }};
    }
    if (label == "cubic") {
        return {label, [](double s) { return -s; }, [](double) { return -1.0; }, [](double) { return 0.0; },
                [](double s) { return -0.5 * s * s; }};
    }
    fail(ErrorCode::ConfigInvalid, "unknown nonlinearity '" + label + "'");
}

std::vector<std::string> Nonlinearity::labels() { return {"saturated", "saturated_quintic", "cubic"}; }

}  // namespace nlsosc
