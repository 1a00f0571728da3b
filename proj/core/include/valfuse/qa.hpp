// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "valfuse/types.hpp"

namespace valfuse {

struct QaTrainConfig {
    double learning_rate = 0.1;
    std::size_t max_epochs = 500;
    double convergence_epsilon = 1e-8;
    std::uint64_t seed = 0;  // reserved; full-batch GD from a fixed init is deterministic

    void validate() const;
};

/// Learned bias-free stacker weights plus training diagnostics.
struct QaStackerWeights {
    std::vector<double> w;  // length N_models, unconstrained
    double final_loss = 0.0;
    std::size_t epochs_run = 0;

    /// w rescaled to sum 1 when the sum is positive; for reporting only.
    std::vector<double> normalized() const;
};

/// logits[b][a] = sum_i w[i] * X[b][i][a]. Returned row-major B x N_answers.
std::vector<double> qa_forward(const QaScoreTensor& x, const std::vector<double>& w);

/// -log softmax(logits)[label], computed with max-subtraction.
double softmax_cross_entropy(const std::vector<double>& logits, std::size_t label);

/// Mean cross-entropy over the batch.
double qa_loss(const QaScoreTensor& x, const QaLabels& labels, const std::vector<double>& w);

/// Gradient of the mean cross-entropy with respect to w.
std::vector<double> qa_gradient(const QaScoreTensor& x, const QaLabels& labels,
                                const std::vector<double>& w);

/// Full-batch gradient descent from the uniform init w[i] = 1/N, stopping
/// early when the loss delta falls below convergence_epsilon.
QaStackerWeights train_qa_weights(const QaScoreTensor& x, const QaLabels& labels,
                                  const QaTrainConfig& config = {});

/// Per-example argmax of the fused logits, ties to the smaller answer index.
std::vector<std::size_t> qa_predict(const QaScoreTensor& x, const std::vector<double>& w);

}  // namespace valfuse
