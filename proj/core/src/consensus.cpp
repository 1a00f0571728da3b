// SPDX-License-Identifier: Apache-2.0
#include "valfuse/consensus.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <unordered_set>

#include "valfuse/errors.hpp"

namespace valfuse {

void CaptionSet::validate() const {
    if (captions.empty()) throw ArgumentError("caption set must contain at least one caption");
    std::unordered_set<std::string> seen;
    for (const auto& c : captions) {
        if (!seen.insert(c.model_id).second) {
            throw ArgumentError("caption set has duplicate model_id '" + c.model_id + "'");
        }
    }
}

namespace {

std::string normalize_text(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char ch : text) {
        if (std::isspace(ch)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(ch)));
        }
    }
    return out;
}

std::uint64_t fnv1a64(const char* data, std::size_t len) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::vector<double> trigram_embed(const std::string& text) {
    std::vector<double> vec(kTrigramDim, 0.0);
    const std::string norm = normalize_text(text);
    if (norm.size() < 3) return vec;
    for (std::size_t i = 0; i + 3 <= norm.size(); ++i) {
        vec[fnv1a64(norm.data() + i, 3) % kTrigramDim] += 1.0;
    }
    double norm2 = 0.0;
    for (double v : vec) norm2 += v * v;
    const double scale = 1.0 / std::sqrt(norm2);
    for (double& v : vec) v *= scale;
    return vec;
}

EmbeddingProvider builtin_trigram_provider() {
    return EmbeddingProvider{"builtin-trigram", [](const std::string& t) { return trigram_embed(t); }};
}

double cosine(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) throw ArgumentError("cosine: dimension mismatch");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

double pairwise_similarity(const std::string& a, const std::string& b,
                           const std::vector<EmbeddingProvider>& providers) {
    if (providers.empty()) throw ArgumentError("pairwise_similarity: no embedding providers");
    double sum = 0.0;
    for (const auto& p : providers) {
        sum += cosine(p.embed(a), p.embed(b));
    }
    return sum / static_cast<double>(providers.size());
}

std::vector<double> consensus_scores(const CaptionSet& set,
                                     const std::vector<EmbeddingProvider>& providers) {
    set.validate();
    if (providers.empty()) throw ArgumentError("consensus_scores: no embedding providers");
    const std::size_t n = set.captions.size();
    if (n == 1) return {1.0};  // selection is forced; score by convention

    // Embed each caption once per provider.
    std::vector<std::vector<std::vector<double>>> embedded(providers.size());
    for (std::size_t p = 0; p < providers.size(); ++p) {
        embedded[p].reserve(n);
        for (const auto& c : set.captions) embedded[p].push_back(providers[p].embed(c.text));
    }

    std::vector<double> scores(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double sim = 0.0;
            for (std::size_t p = 0; p < providers.size(); ++p) {
                sim += cosine(embedded[p][i], embedded[p][j]);
            }
            scores[i] += sim / static_cast<double>(providers.size());
        }
        scores[i] /= static_cast<double>(n - 1);
    }
    return scores;
}

ConsensusResult select_caption(const CaptionSet& set,
                               const std::vector<EmbeddingProvider>& providers) {
    ConsensusResult result;
    result.scores = consensus_scores(set, providers);
    result.selected_index = 0;
    for (std::size_t i = 1; i < result.scores.size(); ++i) {
        if (result.scores[i] > result.scores[result.selected_index]) result.selected_index = i;
    }
    result.selected_text = set.captions[result.selected_index].text;
    return result;
}

}  // namespace valfuse
