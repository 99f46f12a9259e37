#pragma once

#include <string>
#include <vector>

#include "sparsegof/tables.hpp"

namespace sparsegof {

struct Dataset {
    std::string name;
    std::string description;
    ContingencyTable table;  // as stored, before preprocessing
};

/// Compiled-in example tables, in a fixed order.
const std::vector<Dataset>& embedded_datasets();

/// Throws Error for an unknown name.
const Dataset& find_dataset(const std::string& name);

}  // namespace sparsegof
