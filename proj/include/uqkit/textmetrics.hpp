#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "uqkit/types.hpp"

namespace uqkit::text {

// Splits on runs of Unicode whitespace (ASCII whitespace bytes in UTF-8).
// Idempotent on space-joined output.
Tokens tokenize(const std::string& text);

// Token-level edit distance. `cutoff`, when >= 0, allows early abandon:
// any return value > cutoff means "distance exceeds cutoff".
std::size_t levenshtein(const Tokens& a, const Tokens& b, long cutoff = -1);

// Exact-match Meteor variant: greedy left-to-right unigram alignment with
// chunk minimization, F = 10PR/(R+9P), penalty 0.5*(chunks/m)^3.
// Returns 0 when either side is empty or there are no matches.
double sim(const Tokens& hyp, const Tokens& ref);

// Sim over all unordered pairs i<j; result has n*(n-1)/2 entries.
std::vector<double> pairwise_sims(const std::vector<Tokens>& hyps);

}  // namespace uqkit::text
