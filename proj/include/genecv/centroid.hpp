#pragma once
#include <cmath>
#include <span>

#include "genecv/error.hpp"

namespace genecv {

inline double pearson(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "classifiers", "correlation needs vectors of equal length");
    require(a.size() >= 2, "classifiers", "correlation needs at least 2 components");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    require(saa > 0.0 && sbb > 0.0, "classifiers", "correlation undefined for constant vector");
    return sab / std::sqrt(saa * sbb);
}

// Assigns class 1 when the correlation with the class-1 centroid exceeds the
// threshold, class 2 otherwise (the threshold itself goes to class 2).
inline int centroid_corr_rule(std::span<const double> reference, std::span<const double> y,
                              double threshold) {
    return pearson(y, reference) > threshold ? 1 : 2;
}

} // namespace genecv
