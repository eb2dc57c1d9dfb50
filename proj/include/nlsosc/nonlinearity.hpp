#pragma once

#include <functional>
#include <string>
#include <vector>

namespace nlsosc {

// g enters i u_t = -Lap u + g(|u|^2) u; G is the primitive with G(0) = 0.
struct Nonlinearity {
    std::string label;
    std::function<double(double)> g;
    std::function<double(double)> dg;
    std::function<double(double)> d2g;
    std::function<double(double)> G;

    // "saturated": -s/(1+s), "saturated_quintic": -s^3/(1+s^2), "cubic": -s
    static Nonlinearity from_label(const std::string& label);
    static std::vector<std::string> labels();
};

}  // namespace nlsosc
