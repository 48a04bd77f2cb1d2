#pragma once

#include "dcsvm/dataset.hpp"
#include "dcsvm/dcsvm_tree.hpp"
#include "dcsvm/prediction_table.hpp"
#include "dcsvm/random.hpp"
#include "dcsvm/svm.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace fixtures {

using dcsvm::AllPredictionsTable;
using dcsvm::BinarySvmModel;
using dcsvm::ClassPair;
using dcsvm::FeatureVector;
using dcsvm::LikelihoodPair;

inline std::string data_path(const std::string &name) {
    return std::string{ DCSVM_DATA_DIR } + "/" + name;
}

inline std::vector<ClassPair> all_pairs(std::size_t k) {
    std::vector<ClassPair> pairs;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            pairs.push_back({ i, j });
        }
    }
    return pairs;
}

inline std::vector<std::size_t> iota(std::size_t k) {
    std::vector<std::size_t> v(k);
    for (std::size_t c = 0; c < k; ++c) {
        v[c] = c;
    }
    return v;
}

inline std::vector<int> labels_1_to(std::size_t k) {
    std::vector<int> labels(k);
    for (std::size_t c = 0; c < k; ++c) {
        labels[c] = static_cast<int>(c) + 1;
    }
    return labels;
}

// Glass labels {1,2,3,5,6,7} map to internal indices 0..5.
inline const std::vector<int> glass_labels{ 1, 2, 3, 5, 6, 7 };

inline std::size_t glass_index(int label) {
    for (std::size_t c = 0; c < glass_labels.size(); ++c) {
        if (glass_labels[c] == label) {
            return c;
        }
    }
    throw std::out_of_range{ "not a glass label" };
}

inline ClassPair glass_pair(int a, int b) {
    return { glass_index(a), glass_index(b) };
}

/**
 * Likelihood table with the decided/undecided pattern of the glass worked example at theta = 0.
 * Pattern characters per column 1,2,3,5,6,7: 'i' decided toward i, 'j' decided toward j,
 * 'u' undecided. Undecided cells default to 0.5/0.5; row (1,6) carries 91.8/8.2
 * for class 2 and 30/70 for class 7.
 */
inline AllPredictionsTable glass_fixture_table() {
    const std::map<std::pair<int, int>, std::string> pattern{
        { { 1, 2 }, "ijjjjj" }, { { 1, 3 }, "iujuuu" }, { { 1, 5 }, "iuijuu" }, { { 1, 6 }, "iuiuju" }, { { 1, 7 }, "iuuujj" },
        { { 2, 3 }, "uijiuu" }, { { 2, 5 }, "iiijju" }, { { 2, 6 }, "uiuujj" }, { { 2, 7 }, "uiuiij" }, { { 3, 5 }, "uuijjj" },
        { { 3, 6 }, "iiiiju" }, { { 3, 7 }, "uuiujj" }, { { 5, 6 }, "iiiijj" }, { { 5, 7 }, "iiiijj" }, { { 6, 7 }, "uuuuij" },
    };
    std::vector<ClassPair> rows;
    std::vector<std::vector<LikelihoodPair>> cells;
    for (const auto &[labels, cols] : pattern) {
        rows.push_back(glass_pair(labels.first, labels.second));
        std::vector<LikelihoodPair> row;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            double toward_i = 0.5;
            if (cols[c] == 'i') {
                toward_i = 1.0;
            } else if (cols[c] == 'j') {
                toward_i = 0.0;
            } else if (labels == std::pair{ 1, 6 }) {
                toward_i = glass_labels[c] == 2 ? 0.918 : glass_labels[c] == 7 ? 0.3 : 0.5;
            }
            row.push_back(LikelihoodPair::from_fraction(toward_i));
        }
        cells.push_back(std::move(row));
    }
    return AllPredictionsTable{ std::move(rows), iota(6), std::move(cells), glass_labels };
}

/// Decider on feature `axis` of a `dimension`-vector: decision value = scale * x[axis] + bias.
inline BinarySvmModel axis_model(ClassPair pair, std::size_t dimension, std::size_t axis, double scale = 1.0, double bias = 0.0) {
    BinarySvmModel m;
    m.pair = pair;
    m.kernel = dcsvm::KernelSpec::linear();
    m.dimension = dimension;
    FeatureVector e(dimension, 0.0);
    e[axis] = 1.0;
    FeatureVector minus_e(dimension, 0.0);
    minus_e[axis] = -1.0;
    m.support_vectors = { e, minus_e };
    m.coefficients = { scale / 2.0, -scale / 2.0 };
    m.bias = bias;
    return m;
}

/// One axis decider per pair, pair r reading feature r.
inline std::vector<BinarySvmModel> axis_models(std::size_t k) {
    const auto pairs = all_pairs(k);
    std::vector<BinarySvmModel> models;
    for (std::size_t r = 0; r < pairs.size(); ++r) {
        models.push_back(axis_model(pairs[r], pairs.size(), r));
    }
    return models;
}

/// Colinear classes at positions 0..k-1; pair (i,j) sends l to i iff l <= (i+j)/2.
inline AllPredictionsTable balanced_table(std::size_t k) {
    std::vector<std::vector<LikelihoodPair>> cells;
    const auto pairs = all_pairs(k);
    for (const ClassPair &p : pairs) {
        std::vector<LikelihoodPair> row;
        for (std::size_t l = 0; l < k; ++l) {
            row.push_back(LikelihoodPair::from_fraction(2 * l <= p.i + p.j ? 1.0 : 0.0));
        }
        cells.push_back(std::move(row));
    }
    return AllPredictionsTable{ pairs, iota(k), std::move(cells), labels_1_to(k) };
}

/// Mix of decided, nearly decided and undecided cells.
inline AllPredictionsTable random_table(std::size_t k, dcsvm::Rng &rng) {
    std::vector<std::vector<LikelihoodPair>> cells;
    const auto pairs = all_pairs(k);
    for (std::size_t r = 0; r < pairs.size(); ++r) {
        std::vector<LikelihoodPair> row;
        for (std::size_t l = 0; l < k; ++l) {
            double v = 0.0;
            switch (rng.below(5)) {
            case 0: v = 1.0; break;
            case 1: v = 0.0; break;
            case 2: v = rng.uniform(0.95, 1.0); break;
            case 3: v = rng.uniform(0.0, 0.05); break;
            default: v = static_cast<double>(rng.below(41)) / 40.0; break;
            }
            row.push_back(LikelihoodPair::from_fraction(v));
        }
        cells.push_back(std::move(row));
    }
    return AllPredictionsTable{ pairs, iota(k), std::move(cells), labels_1_to(k) };
}

/// Isotropic Gaussian blobs centred at `centres`, `per_class` samples each, labels 1..k.
inline dcsvm::LabeledDataset blobs(const std::vector<FeatureVector> &centres, std::size_t per_class, double spread, std::uint64_t seed) {
    dcsvm::Rng rng{ seed };
    std::vector<dcsvm::LabeledSample> samples;
    for (std::size_t c = 0; c < centres.size(); ++c) {
        for (std::size_t s = 0; s < per_class; ++s) {
            FeatureVector x = centres[c];
            for (double &v : x) {
                // Box-Muller
                const double u1 = std::max(rng.uniform(), 1e-300);
                const double u2 = rng.uniform();
                v += spread * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
            }
            samples.push_back({ std::move(x), static_cast<int>(c) + 1 });
        }
    }
    return dcsvm::LabeledDataset{ std::move(samples) };
}

}  // namespace fixtures
