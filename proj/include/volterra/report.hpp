#pragma once

#include <string>
#include <vector>

namespace volterra {

struct CheckReport {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

inline CheckReport make_check(std::string name, double max_residual, double tolerance) {
    CheckReport r;
    r.name = std::move(name);
    r.max_residual = max_residual;
    r.tolerance = tolerance;
    r.pass = max_residual <= tolerance;
    return r;
}

inline bool all_pass(const std::vector<CheckReport>& reports) {
    for (const auto& r : reports)
        if (!r.pass) return false;
    return true;
}

}  // namespace volterra
