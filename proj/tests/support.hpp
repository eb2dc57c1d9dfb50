#pragma once

#include "nlsosc/artifacts.hpp"
#include "nlsosc/error.hpp"
#include "nlsosc/ground_family.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

namespace testing {

// Default family shared by the tests of one executable; reused from the cache when present.
inline const nlsosc::FamilyBundle& bundle() {
    static const nlsosc::FamilyBundle b = nlsosc::load_or_build(nlsosc::FamilySpec{});
    return b;
}

inline nlsosc::ErrorCode error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const nlsosc::Error& e) {
        return e.code();
    }
    FAIL("no nlsosc::Error thrown");
    return nlsosc::ErrorCode::ConfigInvalid;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace testing
