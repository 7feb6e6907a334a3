#include "uqkit/stats.hpp"

#include <cmath>

namespace uqkit::stats {

TripleStat triple_stat(std::span<const double> xs) {
    if (xs.empty()) throw DataError("empty statistic input");
    const double n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / n;
    double sq = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        sq += d * d;
    }
    TripleStat out;
    out.mean = mean;
    out.std = std::sqrt(sq / n);
    if (out.std > kComboEps) {
        out.combo = mean / out.std;
    } else {
        out.combo = 0.0;
        out.degenerate = true;
    }
    return out;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw DataError("pearson: length mismatch (" + std::to_string(xs.size()) + " vs " +
                        std::to_string(ys.size()) + ")");
    if (xs.size() < 2) throw DataError("pearson: need at least 2 points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) throw DataError("degenerate correlation input");
    double r = sxy / std::sqrt(sxx * syy);
    if (r > 1.0) r = 1.0;
    if (r < -1.0) r = -1.0;
    return r;
}

double abs_pearson(std::span<const double> xs, std::span<const double> ys) {
    return std::abs(pearson(xs, ys));
}

}  // namespace uqkit::stats
