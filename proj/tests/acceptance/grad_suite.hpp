#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace tvdm::acceptance {

struct GradFamily {
    std::string name;
    std::size_t shapes = 0;  // random configurations checked
    double max_rel_error = 0.0;
};

// Finite-difference checks in double precision over random shapes of every op, layer and loss.
std::vector<GradFamily> run_grad_suite(std::size_t shapes_per_family);

}  // namespace tvdm::acceptance
