#include "uqkit/corpus_index.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "uqkit/textmetrics.hpp"

namespace uqkit::corpus {

namespace {

constexpr const char* kMagic = "UQKIT-IDX v1";

std::string gram_key(const Tokens& tokens, std::size_t start, std::size_t n) {
    std::string key;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) key += ' ';
        key += tokens[start + i];
    }
    return key;
}

}  // namespace

CorpusIndex CorpusIndex::build(const std::vector<std::pair<Tokens, Tokens>>& parallel_corpus) {
    if (parallel_corpus.empty()) throw DataError("empty parallel corpus");
    CorpusIndex idx;
    for (const auto& [src, tgt] : parallel_corpus) {
        idx.src_sentences_.push_back(src);
        idx.tgt_sentences_.push_back(tgt);
        for (int n = 1; n <= kMaxNgramOrder; ++n) {
            if (src.size() < static_cast<std::size_t>(n)) break;
            for (std::size_t i = 0; i + n <= src.size(); ++i)
                idx.ngram_sets_[n - 1].insert(gram_key(src, i, static_cast<std::size_t>(n)));
        }
    }
    return idx;
}

bool CorpusIndex::contains_ngram(const Tokens& gram) const {
    if (gram.empty() || gram.size() > kMaxNgramOrder) return false;
    return ngram_sets_[gram.size() - 1].count(gram_key(gram, 0, gram.size())) > 0;
}

DsGram CorpusIndex::ds_gram(const Tokens& x, int n) const {
    if (n < 1 || n > kMaxNgramOrder)
        throw DataError("ds_gram: N must be in 1.." + std::to_string(kMaxNgramOrder));
    DsGram out;
    const long total = static_cast<long>(x.size()) - n + 1;
    if (total <= 0) {
        out.degenerate = true;
        return out;
    }
    long covered = 0;
    const auto& set = ngram_sets_[n - 1];
    for (long i = 0; i < total; ++i)
        if (set.count(gram_key(x, static_cast<std::size_t>(i), static_cast<std::size_t>(n))))
            ++covered;
    out.value = static_cast<double>(covered) / static_cast<double>(total);
    return out;
}

DsNeighbors CorpusIndex::ds_neighbors(const Tokens& q, int k, Side side) const {
    if (k <= 0) throw DataError("ds_neighbors: K must be positive");
    const auto& sentences = side == Side::Src ? src_sentences_ : tgt_sentences_;
    if (sentences.empty()) throw DataError("ds_neighbors: empty index");

    // Exhaustive scan keeping the K best (distance, position) pairs; the
    // cutoff lets the DP abandon rows that cannot beat the current worst.
    std::vector<std::pair<std::size_t, std::size_t>> best;  // (distance, position)
    best.reserve(static_cast<std::size_t>(k) + 1);
    for (std::size_t pos = 0; pos < sentences.size(); ++pos) {
        long cutoff = -1;
        if (best.size() == static_cast<std::size_t>(k))
            cutoff = static_cast<long>(best.back().first);
        const std::size_t d = text::levenshtein(q, sentences[pos], cutoff);
        if (cutoff >= 0 && d > static_cast<std::size_t>(cutoff)) continue;
        const std::pair<std::size_t, std::size_t> cand{d, pos};
        auto it = std::upper_bound(best.begin(), best.end(), cand);
        best.insert(it, cand);
        if (best.size() > static_cast<std::size_t>(k)) best.pop_back();
    }

    DsNeighbors out;
    out.truncated = best.size() < static_cast<std::size_t>(k);
    double sum = 0.0;
    for (const auto& [d, pos] : best) sum += text::sim(q, sentences[pos]);
    out.value = sum / static_cast<double>(best.size());
    return out;
}

void CorpusIndex::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open index snapshot for writing: " + path);
    out << kMagic << '\n';
    for (int n = 1; n <= kMaxNgramOrder; ++n) {
        out << "[NGRAMS N=" << n << "]\n";
        std::vector<std::string> grams(ngram_sets_[n - 1].begin(), ngram_sets_[n - 1].end());
        std::sort(grams.begin(), grams.end());
        for (const auto& g : grams) out << g << '\n';
    }
    out << "[SRC]\n";
    for (const auto& s : src_sentences_) out << join_tokens(s) << '\n';
    out << "[TGT]\n";
    for (const auto& s : tgt_sentences_) out << join_tokens(s) << '\n';
}

CorpusIndex CorpusIndex::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open index snapshot: " + path);
    std::string line;
    if (!std::getline(in, line) || line != kMagic)
        throw DataError(path + ": bad index snapshot header (expected '" + kMagic + "')");

    CorpusIndex idx;
    int current_ngram = 0;  // 0 = none, -1 = SRC, -2 = TGT
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("[NGRAMS N=", 0) == 0) {
            current_ngram = std::stoi(line.substr(10));
            if (current_ngram < 1 || current_ngram > kMaxNgramOrder)
                throw DataError(path + ": bad n-gram section '" + line + "'");
            continue;
        }
        if (line == "[SRC]") {
            current_ngram = -1;
            continue;
        }
        if (line == "[TGT]") {
            current_ngram = -2;
            continue;
        }
        if (current_ngram > 0) {
            idx.ngram_sets_[current_ngram - 1].insert(line);
        } else if (current_ngram == -1) {
            idx.src_sentences_.push_back(text::tokenize(line));
        } else if (current_ngram == -2) {
            idx.tgt_sentences_.push_back(text::tokenize(line));
        } else {
            throw DataError(path + ": content before the first section");
        }
    }
    if (idx.src_sentences_.size() != idx.tgt_sentences_.size())
        throw DataError(path + ": src/tgt sentence counts differ");
    if (idx.src_sentences_.empty()) throw DataError(path + ": empty sentence store");
    return idx;
}

}  // namespace uqkit::corpus
