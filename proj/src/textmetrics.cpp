#include "uqkit/textmetrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace uqkit::text {

namespace {

bool is_space_byte(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

Tokens tokenize(const std::string& text) {
    Tokens out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && is_space_byte(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < n && !is_space_byte(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) out.push_back(text.substr(start, i - start));
    }
    return out;
}

std::size_t levenshtein(const Tokens& a, const Tokens& b, long cutoff) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    if (n == 0) return m;
    if (m == 0) return n;
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    std::iota(prev.begin(), prev.end(), std::size_t{0});
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        std::size_t row_min = cur[0];
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
            row_min = std::min(row_min, cur[j]);
        }
        if (cutoff >= 0 && row_min > static_cast<std::size_t>(cutoff))
            return static_cast<std::size_t>(cutoff) + 1;
        std::swap(prev, cur);
    }
    return prev[m];
}

double sim(const Tokens& hyp, const Tokens& ref) {
    if (hyp.empty() || ref.empty()) return 0.0;

    // Candidate ref positions per token.
    std::unordered_map<std::string, std::vector<std::size_t>> ref_pos;
    for (std::size_t j = 0; j < ref.size(); ++j) ref_pos[ref[j]].push_back(j);

    std::vector<bool> used(ref.size(), false);
    std::size_t matches = 0;
    std::size_t chunks = 0;
    long prev_ref = -2;  // ref index of the previous hyp match
    for (const auto& tok : hyp) {
        auto it = ref_pos.find(tok);
        if (it == ref_pos.end()) continue;
        long pick = -1;
        // Prefer continuing the current chunk, otherwise smallest free index.
        if (prev_ref >= 0) {
            const std::size_t next = static_cast<std::size_t>(prev_ref) + 1;
            if (next < ref.size() && !used[next] && ref[next] == tok) pick = static_cast<long>(next);
        }
        if (pick < 0) {
            for (std::size_t j : it->second) {
                if (!used[j]) {
                    pick = static_cast<long>(j);
                    break;
                }
            }
        }
        if (pick < 0) continue;
        used[static_cast<std::size_t>(pick)] = true;
        ++matches;
        if (pick != prev_ref + 1) ++chunks;
        prev_ref = pick;
    }

    if (matches == 0) return 0.0;
    const double m = static_cast<double>(matches);
    const double p = m / static_cast<double>(hyp.size());
    const double r = m / static_cast<double>(ref.size());
    const double f = 10.0 * p * r / (r + 9.0 * p);
    const double frag = static_cast<double>(chunks) / m;
    const double penalty = 0.5 * frag * frag * frag;
    return f * (1.0 - penalty);
}

std::vector<double> pairwise_sims(const std::vector<Tokens>& hyps) {
    if (hyps.size() < 2) throw DataError("insufficient samples");
    std::vector<double> out;
    out.reserve(hyps.size() * (hyps.size() - 1) / 2);
    for (std::size_t i = 0; i < hyps.size(); ++i)
        for (std::size_t j = i + 1; j < hyps.size(); ++j) out.push_back(sim(hyps[i], hyps[j]));
    return out;
}

}  // namespace uqkit::text
