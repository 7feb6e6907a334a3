#include <algorithm>
#include <vector>

#include "doctest.h"
#include "uqkit/rng.hpp"
#include "uqkit/textmetrics.hpp"

using namespace uqkit;

namespace {

// Independent full-matrix Levenshtein for the oracle comparison.
std::size_t lev_oracle(const Tokens& a, const Tokens& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                            std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    return d[a.size()][b.size()];
}

Tokens random_tokens(const rng::Key& key, std::uint64_t base, int max_len, int vocab) {
    const int len = static_cast<int>(rng::uniform_int(key, base, static_cast<std::uint64_t>(max_len + 1)));
    Tokens out;
    for (int i = 0; i < len; ++i)
        out.push_back("w" + std::to_string(rng::uniform_int(
                                key, base + 1 + static_cast<std::uint64_t>(i),
                                static_cast<std::uint64_t>(vocab))));
    return out;
}

}  // namespace

TEST_CASE("tokenize splits on whitespace runs and is idempotent") {
    CHECK(text::tokenize("a b  c") == Tokens{"a", "b", "c"});
    CHECK(text::tokenize("  \t a\nb\r\n ") == Tokens{"a", "b"});
    CHECK(text::tokenize("") == Tokens{});
    CHECK(text::tokenize("   ") == Tokens{});
    // Non-ASCII bytes are ordinary token content.
    CHECK(text::tokenize("caf\xc3\xa9 au lait") == Tokens{"caf\xc3\xa9", "au", "lait"});
    const auto toks = text::tokenize("ein  Haus \t am   See");
    CHECK(text::tokenize(join_tokens(toks)) == toks);
}

TEST_CASE("levenshtein basics") {
    CHECK(text::levenshtein({}, {}) == 0);
    CHECK(text::levenshtein({"a"}, {}) == 1);
    CHECK(text::levenshtein({}, {"a", "b"}) == 2);
    CHECK(text::levenshtein({"a", "b", "c"}, {"a", "b", "c"}) == 0);
    CHECK(text::levenshtein({"a", "b", "c"}, {"a", "x", "c"}) == 1);
    CHECK(text::levenshtein({"k", "i", "t", "t", "e", "n"}, {"s", "i", "t", "t", "i", "n", "g"}) == 3);
}

TEST_CASE("levenshtein matches the full-matrix oracle on 200 random instances") {
    const auto key = rng::make_key(41, "lev-oracle", 0);
    for (int t = 0; t < 200; ++t) {
        const auto a = random_tokens(key, static_cast<std::uint64_t>(t) * 100, 12, 5);
        const auto b = random_tokens(key, static_cast<std::uint64_t>(t) * 100 + 50, 12, 5);
        CHECK(text::levenshtein(a, b) == lev_oracle(a, b));
    }
}

TEST_CASE("levenshtein cutoff early abandon stays conservative") {
    const auto key = rng::make_key(42, "lev-cutoff", 0);
    for (int t = 0; t < 200; ++t) {
        const auto a = random_tokens(key, static_cast<std::uint64_t>(t) * 100, 10, 4);
        const auto b = random_tokens(key, static_cast<std::uint64_t>(t) * 100 + 50, 10, 4);
        const std::size_t exact = lev_oracle(a, b);
        for (long cutoff : {0L, 1L, 2L, 5L}) {
            const std::size_t got = text::levenshtein(a, b, cutoff);
            if (exact <= static_cast<std::size_t>(cutoff)) {
                CHECK(got == exact);
            } else {
                CHECK(got > static_cast<std::size_t>(cutoff));
            }
        }
    }
}

TEST_CASE("sim hand-computed values") {
    // Identical 3 distinct tokens: F=1, 1 chunk, penalty 0.5*(1/3)^3.
    CHECK(text::sim({"a", "b", "c"}, {"a", "b", "c"}) ==
          doctest::Approx(0.9814814814814815).epsilon(1e-12));
    // 3 of 4 match in 2 chunks: F=0.75, penalty 0.5*(2/3)^3.
    CHECK(text::sim({"a", "b", "c", "d"}, {"a", "b", "x", "d"}) ==
          doctest::Approx(0.6388888888888888).epsilon(1e-12));
}

TEST_CASE("sim guard values") {
    CHECK(text::sim({}, {"a"}) == 0.0);
    CHECK(text::sim({"a"}, {}) == 0.0);
    CHECK(text::sim({}, {}) == 0.0);
    CHECK(text::sim({"a", "b"}, {"x", "y"}) == 0.0);
    // Single shared token: P=R=1 on one token, one chunk of one match.
    CHECK(text::sim({"a"}, {"a"}) == doctest::Approx(1.0 - 0.5).epsilon(1e-12));
}

TEST_CASE("sim stays in [0,1] and self-similarity uses one chunk") {
    const auto key = rng::make_key(43, "sim-range", 0);
    for (int t = 0; t < 300; ++t) {
        const auto a = random_tokens(key, static_cast<std::uint64_t>(t) * 100, 10, 4);
        const auto b = random_tokens(key, static_cast<std::uint64_t>(t) * 100 + 50, 10, 4);
        const double s = text::sim(a, b);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }
    // Distinct-token self comparison: m=|x|, chunks=1.
    const Tokens x = {"p", "q", "r", "s", "t"};
    const double m = 5.0;
    CHECK(text::sim(x, x) == doctest::Approx(1.0 - 0.5 / (m * m * m)).epsilon(1e-12));
}

TEST_CASE("sim oracle: independent greedy alignment on small instances") {
    // Re-derives matches/chunks with an explicit reimplementation.
    auto oracle = [](const Tokens& hyp, const Tokens& ref) {
        if (hyp.empty() || ref.empty()) return 0.0;
        std::vector<bool> used(ref.size(), false);
        long prev = -2;
        double m = 0, chunks = 0;
        for (const auto& tok : hyp) {
            long pick = -1;
            if (prev >= 0 && static_cast<std::size_t>(prev + 1) < ref.size() &&
                !used[static_cast<std::size_t>(prev + 1)] && ref[static_cast<std::size_t>(prev + 1)] == tok)
                pick = prev + 1;
            if (pick < 0)
                for (std::size_t j = 0; j < ref.size(); ++j)
                    if (!used[j] && ref[j] == tok) {
                        pick = static_cast<long>(j);
                        break;
                    }
            if (pick < 0) continue;
            used[static_cast<std::size_t>(pick)] = true;
            m += 1;
            if (pick != prev + 1) chunks += 1;
            prev = pick;
        }
        if (m == 0) return 0.0;
        const double p = m / static_cast<double>(hyp.size());
        const double r = m / static_cast<double>(ref.size());
        const double f = 10.0 * p * r / (r + 9.0 * p);
        return f * (1.0 - 0.5 * (chunks / m) * (chunks / m) * (chunks / m));
    };
    const auto key = rng::make_key(44, "sim-oracle", 0);
    for (int t = 0; t < 300; ++t) {
        const auto a = random_tokens(key, static_cast<std::uint64_t>(t) * 100, 8, 3);
        const auto b = random_tokens(key, static_cast<std::uint64_t>(t) * 100 + 50, 8, 3);
        CHECK(text::sim(a, b) == doctest::Approx(oracle(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("pairwise_sims yields n*(n-1)/2 values in pair order") {
    const std::vector<Tokens> hyps = {{"a", "b"}, {"a", "b"}, {"x"}};
    const auto sims = text::pairwise_sims(hyps);
    REQUIRE(sims.size() == 3);
    CHECK(sims[0] == text::sim(hyps[0], hyps[1]));
    CHECK(sims[1] == text::sim(hyps[0], hyps[2]));
    CHECK(sims[2] == text::sim(hyps[1], hyps[2]));
    CHECK_THROWS_AS(text::pairwise_sims({{"a"}}), DataError);
}
