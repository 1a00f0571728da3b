// SPDX-License-Identifier: Apache-2.0
#include "valfuse/qa.hpp"

#include <algorithm>
#include <cmath>

#include "valfuse/errors.hpp"

namespace valfuse {

void QaTrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ArgumentError("learning_rate must be positive");
    if (max_epochs == 0) throw ArgumentError("max_epochs must be >= 1");
    if (!(convergence_epsilon > 0.0)) throw ArgumentError("convergence_epsilon must be positive");
}

std::vector<double> QaStackerWeights::normalized() const {
    double sum = 0.0;
    for (double v : w) sum += v;
    std::vector<double> out(w.size(), 1.0 / static_cast<double>(w.size()));
    if (sum > 0.0) {
        for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] / sum;
    }
    return out;
}

std::vector<double> qa_forward(const QaScoreTensor& x, const std::vector<double>& w) {
    if (w.size() != x.n_models()) {
        throw ArgumentError("qa_forward: weight length does not match model count");
    }
    const std::size_t b_n = x.n_examples(), m_n = x.n_models(), a_n = x.n_answers();
    std::vector<double> logits(b_n * a_n, 0.0);
    for (std::size_t b = 0; b < b_n; ++b) {
        for (std::size_t i = 0; i < m_n; ++i) {
            const double wi = w[i];
            for (std::size_t a = 0; a < a_n; ++a) {
                logits[b * a_n + a] += wi * x.at(b, i, a);
            }
        }
    }
    return logits;
}

namespace {

// softmax(logits) into `probs`; returns the loss for `label`.
double softmax_row(const double* logits, std::size_t n, std::size_t label, double* probs) {
    double max_logit = logits[0];
    for (std::size_t a = 1; a < n; ++a) max_logit = std::max(max_logit, logits[a]);
    double denom = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        probs[a] = std::exp(logits[a] - max_logit);
        denom += probs[a];
    }
    for (std::size_t a = 0; a < n; ++a) probs[a] /= denom;
    return -(logits[label] - max_logit - std::log(denom));
}

}  // namespace

double softmax_cross_entropy(const std::vector<double>& logits, std::size_t label) {
    if (logits.empty()) throw ArgumentError("softmax_cross_entropy: empty logits");
    if (label >= logits.size()) throw ArgumentError("softmax_cross_entropy: label out of range");
    for (double v : logits) {
        if (!std::isfinite(v)) throw ArgumentError("softmax_cross_entropy: non-finite logit");
    }
    std::vector<double> probs(logits.size());
    return softmax_row(logits.data(), logits.size(), label, probs.data());
}

double qa_loss(const QaScoreTensor& x, const QaLabels& labels, const std::vector<double>& w) {
    if (labels.size() != x.n_examples()) throw ArgumentError("qa_loss: label count mismatch");
    const auto logits = qa_forward(x, w);
    const std::size_t a_n = x.n_answers();
    std::vector<double> probs(a_n);
    double total = 0.0;
    for (std::size_t b = 0; b < x.n_examples(); ++b) {
        total += softmax_row(logits.data() + b * a_n, a_n, labels[b], probs.data());
    }
    return total / static_cast<double>(x.n_examples());
}

std::vector<double> qa_gradient(const QaScoreTensor& x, const QaLabels& labels,
                                const std::vector<double>& w) {
    if (labels.size() != x.n_examples()) throw ArgumentError("qa_gradient: label count mismatch");
    const auto logits = qa_forward(x, w);
    const std::size_t b_n = x.n_examples(), m_n = x.n_models(), a_n = x.n_answers();
    std::vector<double> grad(m_n, 0.0);
    std::vector<double> probs(a_n);
    for (std::size_t b = 0; b < b_n; ++b) {
        softmax_row(logits.data() + b * a_n, a_n, labels[b], probs.data());
        for (std::size_t a = 0; a < a_n; ++a) {
            const double delta = probs[a] - (a == labels[b] ? 1.0 : 0.0);
            for (std::size_t i = 0; i < m_n; ++i) {
                grad[i] += delta * x.at(b, i, a);
            }
        }
    }
    for (double& g : grad) g /= static_cast<double>(b_n);
    return grad;
}

QaStackerWeights train_qa_weights(const QaScoreTensor& x, const QaLabels& labels,
                                  const QaTrainConfig& config) {
    config.validate();
    if (labels.size() != x.n_examples()) throw ArgumentError("train_qa_weights: label count mismatch");

    QaStackerWeights result;
    result.w.assign(x.n_models(), 1.0 / static_cast<double>(x.n_models()));
    double prev_loss = qa_loss(x, labels, result.w);
    if (!std::isfinite(prev_loss)) throw ComputationError("non-finite loss at initialization");

    for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
        const auto grad = qa_gradient(x, labels, result.w);
        for (std::size_t i = 0; i < result.w.size(); ++i) {
            result.w[i] -= config.learning_rate * grad[i];
        }
        const double loss = qa_loss(x, labels, result.w);
        if (!std::isfinite(loss)) {
            throw ComputationError("non-finite loss at epoch " + std::to_string(epoch + 1));
        }
        result.epochs_run = epoch + 1;
        result.final_loss = loss;
        if (std::abs(loss - prev_loss) < config.convergence_epsilon) break;
        prev_loss = loss;
    }
    return result;
}

std::vector<std::size_t> qa_predict(const QaScoreTensor& x, const std::vector<double>& w) {
    const auto logits = qa_forward(x, w);
    const std::size_t a_n = x.n_answers();
    std::vector<std::size_t> predictions(x.n_examples());
    for (std::size_t b = 0; b < x.n_examples(); ++b) {
        const double* row = logits.data() + b * a_n;
        std::size_t best = 0;
        for (std::size_t a = 1; a < a_n; ++a) {
            if (row[a] > row[best]) best = a;
        }
        predictions[b] = best;
    }
    return predictions;
}

}  // namespace valfuse
