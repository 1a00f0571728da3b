// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace valfuse {

struct Caption {
    std::string model_id;
    std::string text;
};

/// Candidate captions for one video, one per model.
struct CaptionSet {
    std::string video_id;
    std::vector<Caption> captions;

    void validate() const;
};

/// A deterministic text -> fixed-dimension vector map.
struct EmbeddingProvider {
    std::string provider_id;
    std::function<std::vector<double>(const std::string&)> embed;
};

struct ConsensusResult {
    std::vector<double> scores;
    std::size_t selected_index = 0;
    std::string selected_text;
};

inline constexpr std::size_t kTrigramDim = 1024;

/// Built-in provider: lowercase, collapse whitespace, count overlapping
/// character 3-grams, hash (FNV-1a 64) each trigram into a 1024-dim bucket
/// vector, L2-normalize. Text shorter than 3 chars maps to the zero vector.
std::vector<double> trigram_embed(const std::string& text);

EmbeddingProvider builtin_trigram_provider();

/// dot(u,v) / (|u| |v|); 0 when either norm is 0.
double cosine(const std::vector<double>& u, const std::vector<double>& v);

/// Mean over providers of the cosine between the two texts' embeddings.
double pairwise_similarity(const std::string& a, const std::string& b,
                           const std::vector<EmbeddingProvider>& providers);

/// Consensus score per caption: average similarity to all other captions.
/// A single-caption set scores [1.0] by convention.
std::vector<double> consensus_scores(const CaptionSet& set,
                                     const std::vector<EmbeddingProvider>& providers);

/// Argmax of consensus_scores, ties to the smallest index.
ConsensusResult select_caption(const CaptionSet& set,
                               const std::vector<EmbeddingProvider>& providers);

}  // namespace valfuse
