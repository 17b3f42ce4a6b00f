#pragma once
// Frozen toy datasets shared by the unit and acceptance suites.

#include "genecv/dataset.hpp"
#include "genecv/synth.hpp"

namespace fixtures {

// n=6, p=4, balanced classes. Features f3 (index 2) and f4 (index 3) carry
// the class signal; f1 and f2 are noise.
inline genecv::LabeledDataset toy6() {
    genecv::LabeledDataset d;
    d.x = genecv::Matrix(6, 4);
    const double values[6][4] = {
        {0.5, -1.2, 0.3, 2.1},  {-0.7, 0.8, -0.2, 1.9}, {1.1, 0.4, 0.1, 2.5},
        {0.9, -0.5, 1.8, -1.0}, {-0.3, 1.5, 2.2, -0.8}, {0.2, -1.1, 1.6, -1.4},
    };
    for (std::size_t r = 0; r < 6; ++r)
        for (std::size_t c = 0; c < 4; ++c) d.x(r, c) = values[r][c];
    d.labels = {1, 1, 1, 2, 2, 2};
    d.feature_names = {"f1", "f2", "f3", "f4"};
    d.class_names = {"1", "2"};
    d.validate();
    return d;
}

// n=9, p=4, class sizes 5 and 4. Feature f2 (index 1) separates the classes.
inline genecv::LabeledDataset toy9() {
    genecv::LabeledDataset d;
    d.x = genecv::Matrix(9, 4);
    const double values[9][4] = {
        {0.2, 1.5, -0.3, 0.8},  {-0.6, 2.1, 0.4, -0.2}, {1.0, 1.8, -0.9, 0.3},
        {0.4, 2.4, 0.7, -1.1},  {-0.2, 1.2, 0.2, 0.6},  {0.7, -1.3, -0.5, 0.1},
        {-0.4, -2.0, 0.8, -0.7}, {0.3, -1.6, -0.2, 0.9}, {-0.9, -1.1, 0.5, -0.4},
    };
    for (std::size_t r = 0; r < 9; ++r)
        for (std::size_t c = 0; c < 4; ++c) d.x(r, c) = values[r][c];
    d.labels = {1, 1, 1, 1, 1, 2, 2, 2, 2};
    d.feature_names = {"f1", "f2", "f3", "f4"};
    d.class_names = {"1", "2"};
    d.validate();
    return d;
}

// p=8 with only feature index 2 informative (separation 6 sigma).
inline genecv::LabeledDataset informative8() {
    genecv::LabeledDataset d = genecv::synth_null(10, 8, {5, 5}, 42);
    for (int j = 0; j < d.n(); ++j)
        d.x(static_cast<std::size_t>(j), 2) += d.labels[static_cast<std::size_t>(j)] == 1 ? 3.0 : -3.0;
    return d;
}

} // namespace fixtures
