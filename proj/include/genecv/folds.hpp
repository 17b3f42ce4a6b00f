#pragma once
#include <cstdint>
#include <numeric>
#include <vector>

#include "genecv/dataset.hpp"
#include "genecv/error.hpp"
#include "genecv/rng.hpp"

namespace genecv {

// Stratified partition of sample indices into K blocks. Blocks are stored
// 0-based; block_sizes[k] is n_k.
struct FoldPlan {
    int k = 0;
    std::vector<int> assignment; // per sample, block in [0, k)
    std::vector<int> block_sizes;
    std::uint64_t seed = 0;

    std::vector<std::vector<int>> blocks() const {
        std::vector<std::vector<int>> out(static_cast<std::size_t>(k));
        for (std::size_t j = 0; j < assignment.size(); ++j)
            out[static_cast<std::size_t>(assignment[j])].push_back(static_cast<int>(j));
        return out;
    }

    std::vector<int> held_in(int block) const {
        std::vector<int> out;
        for (std::size_t j = 0; j < assignment.size(); ++j)
            if (assignment[j] != block) out.push_back(static_cast<int>(j));
        return out;
    }
};

// Within each class the samples are shuffled by a generator seeded from
// (seed, class index) and dealt round-robin; the dealing cursor continues
// across classes so overall block sizes stay within 1 of each other and no
// block is left empty for any K <= n.
inline FoldPlan make_folds(const LabeledDataset& data, int k, std::uint64_t seed) {
    const int n = data.n();
    require(k >= 2 && k <= n, "data",
            "fold count must satisfy 2 <= K <= n (K=" + std::to_string(k) +
                ", n=" + std::to_string(n) + ")");
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignment.assign(static_cast<std::size_t>(n), -1);
    plan.block_sizes.assign(static_cast<std::size_t>(k), 0);

    int cursor = 0;
    for (int cls = 1; cls <= data.n_classes(); ++cls) {
        auto members = data.samples_of_class(cls);
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
        rng.shuffle(members);
        for (int j : members) {
            const int block = cursor % k;
            plan.assignment[static_cast<std::size_t>(j)] = block;
            ++plan.block_sizes[static_cast<std::size_t>(block)];
            ++cursor;
        }
    }
    return plan;
}

} // namespace genecv
