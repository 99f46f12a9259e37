#include "sparsegof/datasets.hpp"

#include "sparsegof/error.hpp"

namespace sparsegof {

namespace {

// TNFAIP3 diplotypes by systemic sclerosis status, n = 794. Published with
// empty diplotype columns already removed.
Dataset make_tnfaip3() {
    std::vector<std::string> cols = {"H1/H1", "H1/H2", "H1/H3", "H1/H4", "H1/H5", "H1/H6",
                                     "H2/H3", "H2/H5", "H2/H6", "H3/H3", "H3/H4", "H3/H5",
                                     "H3/H6", "H4/H5", "H5/H5", "H5/H6"};
    std::vector<std::int64_t> counts = {
        98, 7, 116, 2, 71, 3,  4, 2, 0, 34, 1, 42, 2, 1, 13, 1,   // Sound
        91, 9, 104, 3, 70, 12, 5, 4, 1, 30, 2, 40, 7, 1, 13, 5};  // Affected
    return Dataset{"tnfaip3",
                   "TNFAIP3 diplotype by systemic sclerosis status (2x16, n=794)",
                   ContingencyTable(2, 16, std::move(counts), {"Sound", "Affected"}, std::move(cols))};
}

// River trophic level against presence of rare (r), polluto-tolerant (p) and
// exotic (e) plant species, n = 21. All eight (r,p,e) triplets are listed;
// 101 and 111 were never observed.
Dataset make_camargue() {
    std::vector<std::string> cols = {"000", "100", "010", "001", "110", "101", "011", "111"};
    std::vector<std::int64_t> counts = {
        0, 0, 3, 0, 3, 0, 2, 0,   // Oligotrophic
        2, 1, 0, 2, 1, 0, 0, 0,   // Mesotrophic
        2, 0, 3, 1, 1, 0, 0, 0};  // Eutrophic
    return Dataset{"camargue",
                   "Trophic level by (r,p,e) vegetation triplet in Petite Camargue Alsacienne rivers "
                   "(3x8 raw, 3x6 after removing empty columns, n=21)",
                   ContingencyTable(3, 8, std::move(counts),
                                    {"Oligotrophic", "Mesotrophic", "Eutrophic"}, std::move(cols))};
}

}  // namespace

const std::vector<Dataset>& embedded_datasets() {
    static const std::vector<Dataset> datasets = {make_tnfaip3(), make_camargue()};
    return datasets;
}

const Dataset& find_dataset(const std::string& name) {
    for (const auto& d : embedded_datasets()) {
        if (d.name == name) return d;
    }
    throw Error("unknown dataset '" + name + "' (available: tnfaip3, camargue)");
}

}  // namespace sparsegof
