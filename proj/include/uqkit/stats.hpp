#pragma once

#include <span>
#include <vector>

#include "uqkit/types.hpp"

namespace uqkit::stats {

inline constexpr double kComboEps = 1e-12;

// Mean, population standard deviation and their ratio over one sequence.
// combo is guarded to 0 when std <= kComboEps; `degenerate` records that
// the guard fired.
struct TripleStat {
    double mean = 0.0;
    double std = 0.0;
    double combo = 0.0;
    bool degenerate = false;
};

TripleStat triple_stat(std::span<const double> xs);

// Pearson product-moment correlation; two-pass, 64-bit.
double pearson(std::span<const double> xs, std::span<const double> ys);

double abs_pearson(std::span<const double> xs, std::span<const double> ys);

}  // namespace uqkit::stats
