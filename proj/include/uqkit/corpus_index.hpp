#pragma once

#include <array>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "uqkit/types.hpp"

namespace uqkit::corpus {

inline constexpr int kMaxNgramOrder = 5;

enum class Side { Src, Tgt };

struct DsGram {
    double value = 0.0;
    bool degenerate = false;  // query shorter than N
};

struct DsNeighbors {
    double value = 0.0;
    bool truncated = false;  // corpus smaller than K
};

// N-gram membership sets (orders 1..5) over source sentences plus both
// sentence stores for Levenshtein nearest-neighbor queries.
class CorpusIndex {
public:
    static CorpusIndex build(const std::vector<std::pair<Tokens, Tokens>>& parallel_corpus);

    // Coverage of x's N-grams by the source side, denominator T-N+1.
    DsGram ds_gram(const Tokens& x, int n) const;

    // Mean Sim(q, neighbor) over the K Levenshtein-nearest sentences on
    // the chosen side; ties broken by lower corpus position.
    DsNeighbors ds_neighbors(const Tokens& q, int k, Side side) const;

    std::size_t size() const { return src_sentences_.size(); }
    const std::vector<Tokens>& sentences(Side side) const {
        return side == Side::Src ? src_sentences_ : tgt_sentences_;
    }
    bool contains_ngram(const Tokens& gram) const;

    // Snapshot format: "UQKIT-IDX v1" header, [NGRAMS N=k] sections with
    // lexicographically sorted space-joined grams, then [SRC]/[TGT].
    void save(const std::string& path) const;
    static CorpusIndex load(const std::string& path);

private:
    CorpusIndex() = default;

    std::array<std::unordered_set<std::string>, kMaxNgramOrder> ngram_sets_;
    std::vector<Tokens> src_sentences_;
    std::vector<Tokens> tgt_sentences_;
};

}  // namespace uqkit::corpus
