// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "valfuse/consensus.hpp"
#include "valfuse/retrieval.hpp"
#include "valfuse/types.hpp"

namespace valfuse::io {

/// Similarity matrices are stored either as JSON (ids + row-major scores) or
/// as the compact binary format: magic "VFSM", one version byte, two 64-bit
/// little-endian dims, then row-major 32-bit little-endian floats. The
/// binary format carries no ids; the loader synthesizes q<i>/g<j>. Loading
/// auto-detects the format from the magic bytes; storing picks binary for a
/// ".vfsm" extension and JSON otherwise.
SimilarityMatrix load_similarity_matrix(const std::filesystem::path& path);
void store_similarity_matrix(const SimilarityMatrix& m, const std::filesystem::path& path);

RetrievalGroundTruth load_ground_truth(const std::filesystem::path& path);
void store_ground_truth(const RetrievalGroundTruth& gt, const std::filesystem::path& path);

EnsembleWeights load_weights(const std::filesystem::path& path);
void store_weights(const EnsembleWeights& w, const std::filesystem::path& path);

/// Unconstrained weight vector (QA stacker output).
std::vector<double> load_raw_weights(const std::filesystem::path& path);
void store_raw_weights(const std::vector<double>& w, const std::filesystem::path& path);

struct QaDataset {
    QaScoreTensor scores;
    std::vector<std::string> model_ids;
    std::vector<std::string> example_ids;
};
QaDataset load_qa_scores(const std::filesystem::path& path);
void store_qa_scores(const QaDataset& data, const std::filesystem::path& path);

QaLabels load_qa_labels(const std::filesystem::path& path);
void store_qa_labels(const QaLabels& labels, const std::filesystem::path& path);

std::vector<std::size_t> load_predictions(const std::filesystem::path& path);
void store_predictions(const std::vector<std::size_t>& predicted,
                       const std::filesystem::path& path);

std::vector<CaptionSet> load_caption_sets(const std::filesystem::path& path);
void store_caption_sets(const std::vector<CaptionSet>& sets, const std::filesystem::path& path);

/// Precomputed-embedding provider: a JSON table from exact caption text to a
/// fixed-dimension vector. Requesting a caption absent from the table raises
/// a SchemaError naming the caption.
EmbeddingProvider load_embedding_provider(const std::filesystem::path& path);

std::vector<MomentCandidate> load_moments(const std::filesystem::path& path);
void store_moments(const std::vector<MomentCandidate>& moments,
                   const std::filesystem::path& path);

std::vector<ModelRecord> load_model_records(const std::filesystem::path& path);
void store_model_records(const std::vector<ModelRecord>& records,
                         const std::filesystem::path& path);

/// The min(k, n) records with highest validation_score (ties by model_id),
/// sorted descending by score.
std::vector<ModelRecord> select_top_k_models(const std::vector<ModelRecord>& records,
                                             std::size_t k);

/// Task defaults: captioning 8, QA 16, retrieval 32.
std::size_t default_top_k(const std::string& macro_task);

/// Detector output for one frame region: 1-3 concept strings.
struct ConceptRegion {
    std::vector<std::string> labels;
};

inline constexpr std::size_t kMaxRegions = 10;
inline constexpr std::size_t kMaxLabelsPerRegion = 3;

/// Append each region's labels to the subtitle, regions separated by the
/// literal " [SEP] " token and labels joined with ", ". An empty region list
/// returns the subtitle unchanged.
std::string augment_subtitle_with_concepts(const std::string& subtitle,
                                           const std::vector<ConceptRegion>& regions);

struct SubtitleEntry {
    std::string subtitle;
    std::vector<ConceptRegion> regions;  // may be empty (missing concept data)
};
std::vector<SubtitleEntry> load_subtitles(const std::filesystem::path& path);
void store_augmented_subtitles(const std::vector<std::string>& lines,
                               const std::filesystem::path& path);

}  // namespace valfuse::io
