#include "dcsvm/baselines.hpp"

#include "dcsvm/error.hpp"
#include "dcsvm/parallel.hpp"

#include "fmt/core.h"

#include <algorithm>
#include <deque>

namespace dcsvm {

std::vector<BinarySvmModel> train_pair_classifiers(const LabeledDataset &train, const KernelSpec &kernel, const SvmHyperParams &hp,
                                                   std::size_t threads) {
    const auto parts = train.partition();
    const std::size_t k = parts.size();
    std::vector<ClassPair> pairs;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            pairs.push_back({ i, j });
        }
    }
    std::vector<BinarySvmModel> models(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t p) {
        const ClassPair pair = pairs[p];
        models[p] = train_binary_svm(parts[pair.i], parts[pair.j], pair, kernel, hp);
    });
    return models;
}

OvoModel make_ovo_model(std::vector<int> labels, std::vector<BinarySvmModel> classifiers) {
    std::sort(classifiers.begin(), classifiers.end(), [](const BinarySvmModel &a, const BinarySvmModel &b) { return a.pair < b.pair; });
    const std::size_t k = labels.size();
    std::size_t expected = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            if (expected >= classifiers.size() || classifiers[expected].pair != ClassPair{ i, j }) {
                throw ValidationError{ fmt::format("one-vs-one model is missing the classifier for ({}, {})", labels[i], labels[j]) };
            }
            ++expected;
        }
    }
    if (expected != classifiers.size()) {
        throw ValidationError{ "one-vs-one model has classifiers outside its class pairs" };
    }
    return { std::move(labels), std::move(classifiers) };
}

OvoPrediction ovo_predict(const OvoModel &model, std::span<const double> x) {
    OvoPrediction prediction;
    prediction.votes.assign(model.class_count(), 0);
    for (const BinarySvmModel &m : model.classifiers) {
        ++prediction.votes[predict_binary(m, x).label];
        ++prediction.evaluations;
        prediction.support_vectors += m.support_vector_count();
    }
    // max_element returns the first maximum, i.e. the smallest label
    prediction.class_index = static_cast<std::size_t>(std::max_element(prediction.votes.begin(), prediction.votes.end()) - prediction.votes.begin());
    prediction.label = model.labels[prediction.class_index];
    return prediction;
}

DagPrediction dag_predict(const OvoModel &model, std::span<const double> x) {
    std::deque<std::size_t> candidates;
    for (std::size_t c = 0; c < model.class_count(); ++c) {
        candidates.push_back(c);
    }
    DagPrediction prediction;
    while (candidates.size() > 1) {
        const std::size_t a = candidates[0];
        const std::size_t b = candidates[1];
        const BinarySvmModel &m = find_pair_classifier(model.classifiers, { a, b });
        const std::size_t winner = predict_binary(m, x).label;
        candidates.erase(candidates.begin() + (winner == a ? 1 : 0));
        ++prediction.steps;
        prediction.support_vectors += m.support_vector_count();
    }
    prediction.class_index = candidates.front();
    prediction.label = model.labels[prediction.class_index];
    return prediction;
}

OvrModel train_ovr(const LabeledDataset &train, const KernelSpec &kernel, const SvmHyperParams &hp, std::size_t threads) {
    const auto parts = train.partition();
    const std::size_t k = parts.size();
    OvrModel model;
    model.labels = train.class_labels();
    model.classifiers.resize(k);
    parallel_for(k, threads, [&](std::size_t t) {
        std::vector<FeatureVector> rest;
        for (std::size_t c = 0; c < k; ++c) {
            if (c != t) {
                rest.insert(rest.end(), parts[c].begin(), parts[c].end());
            }
        }
        model.classifiers[t] = train_binary_svm(parts[t], rest, { t, k }, kernel, hp);
    });
    return model;
}

OvrPrediction ovr_predict(const OvrModel &model, std::span<const double> x) {
    OvrPrediction prediction;
    for (const BinarySvmModel &m : model.classifiers) {
        prediction.decision_values.push_back(m.decision_value(x));
        prediction.support_vectors += m.support_vector_count();
    }
    prediction.class_index = static_cast<std::size_t>(
        std::max_element(prediction.decision_values.begin(), prediction.decision_values.end()) - prediction.decision_values.begin());
    prediction.label = model.labels[prediction.class_index];
    return prediction;
}

}  // namespace dcsvm
