#include "dcsvm/svm.hpp"

#include "dcsvm/error.hpp"

#include "fmt/core.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

namespace dcsvm {

void SvmHyperParams::validate() const {
    if (!(C > 0.0 && std::isfinite(C))) {
        throw ValidationError{ fmt::format("cost C must be positive, got {}", C) };
    }
    if (!(tol > 0.0 && std::isfinite(tol))) {
        throw ValidationError{ fmt::format("tolerance must be positive, got {}", tol) };
    }
    if (max_iterations == 0) {
        throw ValidationError{ "max_iterations must be positive" };
    }
}

double BinarySvmModel::decision_value(std::span<const double> x) const {
    if (x.size() != dimension) {
        throw DimensionError{ fmt::format("svm_{{{},{}}} expects dimension {}, got {}", pair.i, pair.j, dimension, x.size()) };
    }
    double sum = bias;
    for (std::size_t m = 0; m < support_vectors.size(); ++m) {
        sum += coefficients[m] * kernel_eval(kernel, support_vectors[m], x);
    }
    return sum;
}

BinaryPrediction predict_binary(const BinarySvmModel &model, std::span<const double> x) {
    const double value = model.decision_value(x);
    return { value > 0.0 ? model.pair.i : model.pair.j, value };
}

namespace {

// Rows of the kernel matrix. Small problems keep the full matrix; larger ones recompute the
// two rows an SMO step needs.
class KernelRows {
  public:
    static constexpr std::size_t full_matrix_limit = 2000;

    KernelRows(std::span<const FeatureVector> points, const KernelSpec &kernel) :
        points_{ points },
        kernel_{ kernel },
        n_{ points.size() },
        diagonal_(points.size()) {
        if (n_ <= full_matrix_limit) {
            full_.resize(n_ * n_);
            for (std::size_t s = 0; s < n_; ++s) {
                for (std::size_t t = s; t < n_; ++t) {
                    const double value = checked(s, t);
                    full_[s * n_ + t] = value;
                    full_[t * n_ + s] = value;
                }
            }
            for (std::size_t s = 0; s < n_; ++s) {
                diagonal_[s] = full_[s * n_ + s];
            }
        } else {
            for (std::size_t s = 0; s < n_; ++s) {
                diagonal_[s] = checked(s, s);
            }
            for (auto &slot : slots_) {
                slot.values.resize(n_);
            }
        }
    }

    [[nodiscard]] double diagonal(std::size_t s) const { return diagonal_[s]; }

    /// Row `s`; `slot` (0 or 1) selects which buffer backs it when rows are computed on demand.
    [[nodiscard]] std::span<const double> row(std::size_t s, std::size_t slot) {
        if (!full_.empty()) {
            return { full_.data() + s * n_, n_ };
        }
        Slot &buffer = slots_[slot];
        if (buffer.index != s) {
            for (std::size_t t = 0; t < n_; ++t) {
                buffer.values[t] = checked(s, t);
            }
            buffer.index = s;
        }
        return buffer.values;
    }

  private:
    struct Slot {
        std::optional<std::size_t> index;
        std::vector<double> values;
    };

    double checked(std::size_t s, std::size_t t) const {
        const double value = kernel_eval(kernel_, points_[s], points_[t]);
        if (!std::isfinite(value)) {
            throw NumericError{ fmt::format("non-finite kernel value k(x_{}, x_{})", s, t) };
        }
        return value;
    }

    std::span<const FeatureVector> points_;
    KernelSpec kernel_;
    std::size_t n_;
    std::vector<double> diagonal_;
    std::vector<double> full_;
    std::array<Slot, 2> slots_;
};

constexpr double tau = 1e-12;  // floor for non-positive curvature along a pair direction

}  // namespace

DualSolution solve_dual(std::span<const FeatureVector> points, std::span<const int> labels, const KernelSpec &kernel,
                        const SvmHyperParams &hp) {
    kernel.validate();
    hp.validate();
    const std::size_t n = points.size();
    if (labels.size() != n) {
        throw DimensionError{ "one label per training point required" };
    }
    const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
    const bool has_neg = std::find(labels.begin(), labels.end(), -1) != labels.end();
    if (!has_pos || !has_neg || std::any_of(labels.begin(), labels.end(), [](int y) { return y != 1 && y != -1; })) {
        throw CardinalityError{ "binary SVM training needs +1/-1 labels with both classes present" };
    }

    const double C = hp.C;
    KernelRows rows{ points, kernel };
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // Q alpha - e
    const auto y = [&](std::size_t t) { return static_cast<double>(labels[t]); };
    const auto in_up = [&](std::size_t t) { return labels[t] == 1 ? alpha[t] < C : alpha[t] > 0.0; };
    const auto in_low = [&](std::size_t t) { return labels[t] == 1 ? alpha[t] > 0.0 : alpha[t] < C; };

    DualSolution solution;
    for (; solution.iterations < hp.max_iterations; ++solution.iterations) {
        // first index: maximal -y_t G_t over the "up" set
        double g_max = -std::numeric_limits<double>::infinity();
        std::optional<std::size_t> first;
        for (std::size_t t = 0; t < n; ++t) {
            if (in_up(t) && -y(t) * grad[t] > g_max) {
                g_max = -y(t) * grad[t];
                first = t;
            }
        }
        if (!first) {
            solution.converged = true;
            break;
        }
        const std::size_t i = *first;
        const auto row_i = rows.row(i, 0);

        // second index: largest objective decrease among violating "low" points
        double g_min = std::numeric_limits<double>::infinity();
        double best_gain = std::numeric_limits<double>::infinity();
        std::optional<std::size_t> second;
        for (std::size_t t = 0; t < n; ++t) {
            if (!in_low(t)) {
                continue;
            }
            const double score = -y(t) * grad[t];
            g_min = std::min(g_min, score);
            const double grad_diff = g_max - score;
            if (grad_diff > 0.0) {
                double quad = rows.diagonal(i) + rows.diagonal(t) - 2.0 * row_i[t];
                if (quad <= 0.0) {
                    quad = tau;
                }
                const double gain = -(grad_diff * grad_diff) / quad;
                if (gain < best_gain) {
                    best_gain = gain;
                    second = t;
                }
            }
        }
        if (g_max - g_min < hp.tol || !second) {
            solution.converged = true;
            break;
        }
        const std::size_t j = *second;
        const auto row_j = rows.row(j, 1);

        const double old_i = alpha[i];
        const double old_j = alpha[j];
        double quad = rows.diagonal(i) + rows.diagonal(j) - 2.0 * row_i[j];
        if (quad <= 0.0) {
            quad = tau;
        }
        if (labels[i] != labels[j]) {
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double delta_i = alpha[i] - old_i;
        const double delta_j = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) {
            grad[t] += y(t) * (y(i) * row_i[t] * delta_i + y(j) * row_j[t] * delta_j);
        }
    }

    // bias from free vectors; midpoint of the feasible interval when none are free
    double upper = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y(t) * grad[t];
        if (alpha[t] >= C) {
            if (labels[t] == -1) {
                upper = std::min(upper, yg);
            } else {
                lower = std::max(lower, yg);
            }
        } else if (alpha[t] <= 0.0) {
            if (labels[t] == 1) {
                upper = std::min(upper, yg);
            } else {
                lower = std::max(lower, yg);
            }
        } else {
            free_sum += yg;
            ++free_count;
        }
    }
    double rho = 0.0;
    if (free_count > 0) {
        rho = free_sum / static_cast<double>(free_count);
    } else if (std::isfinite(upper) && std::isfinite(lower)) {
        rho = (upper + lower) / 2.0;
    } else if (std::isfinite(upper) || std::isfinite(lower)) {
        rho = std::isfinite(upper) ? upper : lower;
    }

    solution.alpha = std::move(alpha);
    solution.bias = -rho;
    return solution;
}

BinarySvmModel train_binary_svm(std::span<const FeatureVector> positive, std::span<const FeatureVector> negative, ClassPair pair,
                                const KernelSpec &kernel, const SvmHyperParams &hp) {
    if (positive.empty() || negative.empty()) {
        throw CardinalityError{ fmt::format("svm_{{{},{}}} needs samples of both classes", pair.i, pair.j) };
    }
    if (pair.i >= pair.j) {
        throw ValidationError{ fmt::format("class pair ({}, {}) must satisfy i < j", pair.i, pair.j) };
    }
    const std::size_t dim = positive.front().size();
    std::vector<FeatureVector> points;
    std::vector<int> labels;
    points.reserve(positive.size() + negative.size());
    labels.reserve(positive.size() + negative.size());
    for (const FeatureVector &x : positive) {
        points.push_back(x);
        labels.push_back(1);
    }
    for (const FeatureVector &x : negative) {
        points.push_back(x);
        labels.push_back(-1);
    }
    for (const FeatureVector &x : points) {
        if (x.size() != dim) {
            throw DimensionError{ fmt::format("training vectors differ in dimension ({} vs {})", x.size(), dim) };
        }
    }

    const DualSolution dual = solve_dual(points, labels, kernel, hp);

    BinarySvmModel model;
    model.pair = pair;
    model.kernel = kernel;
    model.dimension = dim;
    model.bias = dual.bias;
    model.converged = dual.converged;
    model.iterations = dual.iterations;
    for (std::size_t t = 0; t < points.size(); ++t) {
        if (dual.alpha[t] > 0.0) {
            model.support_vectors.push_back(std::move(points[t]));
            model.coefficients.push_back(labels[t] * dual.alpha[t]);
        }
    }
    return model;
}

const BinarySvmModel &find_pair_classifier(std::span<const BinarySvmModel> sorted, ClassPair pair) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), pair, [](const BinarySvmModel &m, const ClassPair &p) { return m.pair < p; });
    if (it == sorted.end() || it->pair != pair) {
        throw ValidationError{ fmt::format("no classifier for pair ({}, {})", pair.i, pair.j) };
    }
    return *it;
}

}  // namespace dcsvm
