// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace valfuse {

/// Dense N_q x N_g score matrix of text queries against gallery items.
/// Row-major, all entries finite, ids unique. Immutable after construction.
class SimilarityMatrix {
public:
    SimilarityMatrix(std::vector<std::string> query_ids,
                     std::vector<std::string> gallery_ids,
                     std::vector<double> scores);

    std::size_t n_queries() const { return query_ids_.size(); }
    std::size_t n_gallery() const { return gallery_ids_.size(); }
    const std::vector<std::string>& query_ids() const { return query_ids_; }
    const std::vector<std::string>& gallery_ids() const { return gallery_ids_; }
    const std::vector<double>& scores() const { return scores_; }

    double at(std::size_t q, std::size_t g) const { return scores_[q * n_gallery() + g]; }

    /// View of one query's scores over the gallery.
    const double* row(std::size_t q) const { return scores_.data() + q * n_gallery(); }

private:
    std::vector<std::string> query_ids_;
    std::vector<std::string> gallery_ids_;
    std::vector<double> scores_;
};

/// Non-negative weights on the probability simplex (sum to 1 within 1e-9).
class EnsembleWeights {
public:
    explicit EnsembleWeights(std::vector<double> weights);

    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    const std::vector<double>& values() const { return weights_; }

private:
    std::vector<double> weights_;
};

/// Map each sampled point in [0,1]^n onto the simplex by dividing by the
/// coordinate sum. An all-zero point maps to the uniform weight vector.
EnsembleWeights normalize_to_simplex(const std::vector<double>& point);

/// One correct gallery index per query.
class RetrievalGroundTruth {
public:
    RetrievalGroundTruth(std::vector<std::size_t> targets, std::size_t n_gallery);

    std::size_t n_queries() const { return targets_.size(); }
    std::size_t n_gallery() const { return n_gallery_; }
    std::size_t target(std::size_t query) const { return targets_[query]; }
    const std::vector<std::size_t>& targets() const { return targets_; }

private:
    std::vector<std::size_t> targets_;
    std::size_t n_gallery_;
};

/// B x N_models x N_answers confidence scores, row-major.
class QaScoreTensor {
public:
    QaScoreTensor(std::size_t n_examples, std::size_t n_models, std::size_t n_answers,
                  std::vector<double> scores);

    std::size_t n_examples() const { return n_examples_; }
    std::size_t n_models() const { return n_models_; }
    std::size_t n_answers() const { return n_answers_; }
    const std::vector<double>& scores() const { return scores_; }

    double at(std::size_t example, std::size_t model, std::size_t answer) const {
        return scores_[(example * n_models_ + model) * n_answers_ + answer];
    }

private:
    std::size_t n_examples_;
    std::size_t n_models_;
    std::size_t n_answers_;
    std::vector<double> scores_;
};

/// Ground-truth answer index per example.
class QaLabels {
public:
    QaLabels(std::vector<std::size_t> labels, std::size_t n_answers);

    std::size_t size() const { return labels_.size(); }
    std::size_t n_answers() const { return n_answers_; }
    std::size_t operator[](std::size_t i) const { return labels_[i]; }
    const std::vector<std::size_t>& values() const { return labels_; }

private:
    std::vector<std::size_t> labels_;
    std::size_t n_answers_;
};

/// A candidate model for top-K selection.
struct ModelRecord {
    std::string model_id;
    double validation_score = 0.0;
    std::string prediction_path;
};

}  // namespace valfuse
