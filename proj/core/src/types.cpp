// SPDX-License-Identifier: Apache-2.0
#include "valfuse/types.hpp"

#include <cmath>
#include <unordered_set>

#include "valfuse/errors.hpp"

namespace valfuse {

namespace {

void require_unique(const std::vector<std::string>& ids, const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second) {
            throw ArgumentError(std::string(what) + " contains duplicate id '" + id + "'");
        }
    }
}

}  // namespace

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> query_ids,
                                   std::vector<std::string> gallery_ids,
                                   std::vector<double> scores)
    : query_ids_(std::move(query_ids)),
      gallery_ids_(std::move(gallery_ids)),
      scores_(std::move(scores)) {
    if (query_ids_.empty() || gallery_ids_.empty()) {
        throw ArgumentError("similarity matrix must have at least one query and gallery item");
    }
    if (scores_.size() != query_ids_.size() * gallery_ids_.size()) {
        throw ArgumentError("similarity matrix score count does not match n_queries * n_gallery");
    }
    require_unique(query_ids_, "query_ids");
    require_unique(gallery_ids_, "gallery_ids");
    for (std::size_t i = 0; i < scores_.size(); ++i) {
        if (!std::isfinite(scores_[i])) {
            throw ArgumentError("similarity matrix entry at row " +
                                std::to_string(i / gallery_ids_.size()) + ", col " +
                                std::to_string(i % gallery_ids_.size()) + " is not finite");
        }
    }
}

EnsembleWeights::EnsembleWeights(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw ArgumentError("weight vector must be non-empty");
    double sum = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0)) throw ArgumentError("ensemble weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ArgumentError("ensemble weights must sum to 1 (got " + std::to_string(sum) + ")");
    }
}

EnsembleWeights normalize_to_simplex(const std::vector<double>& point) {
    if (point.empty()) throw ArgumentError("cannot normalize an empty point");
    double sum = 0.0;
    for (double x : point) {
        if (!(x >= 0.0)) throw ArgumentError("simplex normalization requires non-negative coordinates");
        sum += x;
    }
    std::vector<double> w(point.size());
    if (sum <= 0.0) {
        for (double& x : w) x = 1.0 / static_cast<double>(point.size());
    } else {
        for (std::size_t i = 0; i < point.size(); ++i) w[i] = point[i] / sum;
        // Guard against rounding drift past the 1e-9 tolerance.
        double s = 0.0;
        for (double x : w) s += x;
        w.back() += 1.0 - s;
        if (w.back() < 0.0) w.back() = 0.0;
    }
    return EnsembleWeights(std::move(w));
}

RetrievalGroundTruth::RetrievalGroundTruth(std::vector<std::size_t> targets, std::size_t n_gallery)
    : targets_(std::move(targets)), n_gallery_(n_gallery) {
    if (targets_.empty()) throw ArgumentError("ground truth must cover at least one query");
    if (n_gallery_ == 0) throw ArgumentError("ground truth gallery size must be positive");
    for (std::size_t q = 0; q < targets_.size(); ++q) {
        if (targets_[q] >= n_gallery_) {
            throw ArgumentError("ground truth target for query " + std::to_string(q) +
                                " is out of gallery range");
        }
    }
}

QaScoreTensor::QaScoreTensor(std::size_t n_examples, std::size_t n_models, std::size_t n_answers,
                             std::vector<double> scores)
    : n_examples_(n_examples), n_models_(n_models), n_answers_(n_answers),
      scores_(std::move(scores)) {
    if (n_examples_ == 0 || n_models_ == 0 || n_answers_ == 0) {
        throw ArgumentError("QA tensor dimensions must be positive");
    }
    if (scores_.size() != n_examples_ * n_models_ * n_answers_) {
        throw ArgumentError("QA tensor element count does not match its shape");
    }
    for (double s : scores_) {
        if (!std::isfinite(s)) throw ArgumentError("QA tensor contains a non-finite score");
    }
}

QaLabels::QaLabels(std::vector<std::size_t> labels, std::size_t n_answers)
    : labels_(std::move(labels)), n_answers_(n_answers) {
    if (n_answers_ == 0) throw ArgumentError("label space must be positive");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] >= n_answers_) {
            throw ArgumentError("label at example " + std::to_string(i) + " is out of range");
        }
    }
}

}  // namespace valfuse
