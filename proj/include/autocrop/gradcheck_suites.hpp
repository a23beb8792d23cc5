#pragma once

#include <string>
#include <vector>

namespace autocrop {

struct GradCheckCase {
    std::string name;
    double max_rel_error = 0.0;
    double tolerance = 1e-4;
    bool passed() const { return max_rel_error < tolerance; }
};

// module: "core", "abp", "aa" or "all". Central differences, h = 1e-5.
std::vector<GradCheckCase> run_gradcheck_suite(const std::string& module);

}  // namespace autocrop
