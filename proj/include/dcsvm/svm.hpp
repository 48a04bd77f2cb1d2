#pragma once

#include "dcsvm/dataset.hpp"
#include "dcsvm/kernel.hpp"

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

namespace dcsvm {

struct SvmHyperParams {
    double C{ 1.0 };
    /// Maximal KKT violation accepted at convergence.
    double tol{ 1e-3 };
    std::size_t max_iterations{ 1'000'000 };

    void validate() const;

    bool operator==(const SvmHyperParams &) const = default;
};

/// Internal class indices of a pairwise classifier, `i < j`. Class `i` is trained as +1.
struct ClassPair {
    std::size_t i{};
    std::size_t j{};

    auto operator<=>(const ClassPair &) const = default;
};

/**
 * A trained binary soft-margin SVM. Only vectors with a non-zero dual coefficient are kept;
 * `coefficients[m]` holds y_m * alpha_m for `support_vectors[m]`.
 *
 * decision_value(x) = sum_m coefficients[m] * k(sv_m, x) + bias
 *
 * A strictly positive decision value predicts `pair.i`; zero and below predict `pair.j`.
 */
struct BinarySvmModel {
    ClassPair pair;
    KernelSpec kernel;
    std::size_t dimension{ 0 };
    std::vector<FeatureVector> support_vectors;
    std::vector<double> coefficients;
    double bias{ 0.0 };
    bool converged{ true };
    std::size_t iterations{ 0 };

    [[nodiscard]] std::size_t support_vector_count() const noexcept { return support_vectors.size(); }

    /// Throws `DimensionError` when `x` does not match the model dimension.
    [[nodiscard]] double decision_value(std::span<const double> x) const;
    [[nodiscard]] bool predicts_i(std::span<const double> x) const { return decision_value(x) > 0.0; }

    bool operator==(const BinarySvmModel &) const = default;
};

struct BinaryPrediction {
    std::size_t label;  // pair.i or pair.j
    double decision_value;
};

[[nodiscard]] BinaryPrediction predict_binary(const BinarySvmModel &model, std::span<const double> x);

/// Raw result of the dual solver, one entry per training point.
struct DualSolution {
    std::vector<double> alpha;  // 0 <= alpha <= C
    double bias{ 0.0 };
    std::size_t iterations{ 0 };
    bool converged{ false };
};

/**
 * Solves the soft-margin SVM dual
 *
 *     min_a  1/2 a^T Q a - e^T a,   Q_st = y_s y_t k(x_s, x_t),
 *     s.t.   0 <= a_t <= C,  y^T a = 0
 *
 * by SMO: each iteration picks the maximal violating pair (first-order choice for the first
 * index, second-order gain for the second) and solves the two-variable subproblem analytically.
 * Stops when the maximal KKT violation drops below `hp.tol` or after `hp.max_iterations`.
 * `labels` must hold +1/-1 with both signs present.
 */
[[nodiscard]] DualSolution solve_dual(std::span<const FeatureVector> points, std::span<const int> labels, const KernelSpec &kernel,
                                      const SvmHyperParams &hp);

/// Trains svm_{i,j}: `positive` samples belong to class `pair.i`, `negative` to `pair.j`.
[[nodiscard]] BinarySvmModel train_binary_svm(std::span<const FeatureVector> positive, std::span<const FeatureVector> negative,
                                              ClassPair pair, const KernelSpec &kernel, const SvmHyperParams &hp);

/// Binary search in classifiers sorted by pair. Throws `ValidationError` when the pair is absent.
[[nodiscard]] const BinarySvmModel &find_pair_classifier(std::span<const BinarySvmModel> sorted, ClassPair pair);

}  // namespace dcsvm
