#pragma once

#include <string>

namespace spwell {

/// One verified inequality: pass ⇔ lhs ≤ rhs + tolerance.
struct BoundCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool hard = true;
    std::string detail;

    static BoundCheck make(std::string name, double lhs, double rhs, double tolerance,
                           std::string detail = {}, bool hard = true) {
        BoundCheck c;
        c.name = std::move(name);
        c.lhs = lhs;
        c.rhs = rhs;
        c.margin = rhs - lhs;
        c.tolerance = tolerance;
        c.pass = c.margin >= -tolerance;
        c.hard = hard;
        c.detail = std::move(detail);
        return c;
    }
};

} // namespace spwell
