#pragma once

#include "dcsvm/dataset.hpp"
#include "dcsvm/svm.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace dcsvm {

/// Trains svm_{i,j} on R_i (as +1) and R_j (as -1) for every pair i < j, returned in
/// lexicographic pair order. Pairs are independent and trained on up to `threads` threads.
[[nodiscard]] std::vector<BinarySvmModel> train_pair_classifiers(const LabeledDataset &train, const KernelSpec &kernel,
                                                                 const SvmHyperParams &hp, std::size_t threads = 1);

/// One-vs-one: exactly one classifier per unordered class pair.
struct OvoModel {
    std::vector<int> labels;  // external labels by internal index, ascending
    std::vector<BinarySvmModel> classifiers;  // lexicographic pair order

    [[nodiscard]] std::size_t class_count() const noexcept { return labels.size(); }
};

/// Sorts the classifiers and checks there is exactly one per pair over `labels`.
[[nodiscard]] OvoModel make_ovo_model(std::vector<int> labels, std::vector<BinarySvmModel> classifiers);

struct OvoPrediction {
    int label{};
    std::size_t class_index{};
    std::vector<int> votes;  // per internal class
    std::size_t evaluations{ 0 };
    std::size_t support_vectors{ 0 };
};

/// Majority vote over all k(k-1)/2 classifiers; ties go to the smallest external label.
[[nodiscard]] OvoPrediction ovo_predict(const OvoModel &model, std::span<const double> x);

struct DagPrediction {
    int label{};
    std::size_t class_index{};
    std::size_t steps{ 0 };
    std::size_t support_vectors{ 0 };
};

/// DAGSVM: candidates start in ascending label order; the classifier of the first two
/// candidates is evaluated and the loser is removed, until one remains (always k - 1 steps).
[[nodiscard]] DagPrediction dag_predict(const OvoModel &model, std::span<const double> x);

/// One-vs-rest: classifier t separates class t (+1) from all other classes (-1). Its pair is
/// stored as (t, k), k standing for "rest".
struct OvrModel {
    std::vector<int> labels;
    std::vector<BinarySvmModel> classifiers;

    [[nodiscard]] std::size_t class_count() const noexcept { return labels.size(); }
};

[[nodiscard]] OvrModel train_ovr(const LabeledDataset &train, const KernelSpec &kernel, const SvmHyperParams &hp, std::size_t threads = 1);

struct OvrPrediction {
    int label{};
    std::size_t class_index{};
    std::vector<double> decision_values;
    std::size_t support_vectors{ 0 };
};

/// Class with the largest decision value; ties go to the smallest external label.
[[nodiscard]] OvrPrediction ovr_predict(const OvrModel &model, std::span<const double> x);

}  // namespace dcsvm
