#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace dcsvm {

using FeatureVector = std::vector<double>;

struct LabeledSample {
    FeatureVector features;
    int label{};  // external class id, as found in the input file

    bool operator==(const LabeledSample &) const = default;
};

/**
 * Immutable set of labeled samples with a fixed feature dimension.
 *
 * External labels may be arbitrary integers (glass uses {1,2,3,5,6,7}). They are mapped onto
 * contiguous internal class indices 0..k-1 in ascending label order; algorithms work on the
 * internal indices and reports translate back through `label_of`.
 */
class LabeledDataset {
  public:
    /// Builds the label index from the labels present in `samples`. Requires at least two classes.
    explicit LabeledDataset(std::vector<LabeledSample> samples);

    /// Uses a caller-provided label index (ascending, unique, at least two entries). Classes in the
    /// index may have no samples; this is how train/test splits keep identical class indices.
    LabeledDataset(std::vector<LabeledSample> samples, std::vector<int> class_labels);

    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }
    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] std::size_t class_count() const noexcept { return labels_.size(); }

    [[nodiscard]] const std::vector<LabeledSample> &samples() const noexcept { return samples_; }
    [[nodiscard]] const LabeledSample &operator[](std::size_t i) const { return samples_[i]; }

    /// External labels indexed by internal class index.
    [[nodiscard]] const std::vector<int> &class_labels() const noexcept { return labels_; }
    [[nodiscard]] int label_of(std::size_t class_index) const { return labels_.at(class_index); }
    /// Throws `ValidationError` for a label outside the index.
    [[nodiscard]] std::size_t class_index(int label) const;
    [[nodiscard]] std::optional<std::size_t> find_class(int label) const noexcept;

    /// Internal class index of sample `i`.
    [[nodiscard]] std::size_t class_of(std::size_t i) const { return class_of_[i]; }

    /// The per-class views R_0..R_{k-1}: feature vectors grouped by internal class index.
    [[nodiscard]] std::vector<std::vector<FeatureVector>> partition() const;
    /// Number of samples per internal class.
    [[nodiscard]] std::vector<std::size_t> class_sizes() const;

  private:
    void index_samples();

    std::vector<LabeledSample> samples_;
    std::vector<int> labels_;
    std::vector<std::size_t> class_of_;
    std::size_t dimension_{ 0 };
};

enum class DataFormat { libsvm, csv };

[[nodiscard]] DataFormat parse_data_format(std::string_view name);

/// Feature vectors with optional labels; what `predict` reads, since its input may be unlabeled.
struct SampleSet {
    std::vector<FeatureVector> features;
    std::optional<std::vector<int>> labels;
};

/// LIBSVM text: `<label> <index>:<value> ...`, 1-based ascending indices, absent indices are 0.
/// `dimension` pads every sample to that size (it must cover the largest index seen).
[[nodiscard]] LabeledDataset parse_libsvm(std::istream &in, std::optional<std::size_t> dimension = std::nullopt);

/// Comma separated numeric fields. A non-numeric first row is treated as a header. The label
/// column defaults to the last column.
[[nodiscard]] LabeledDataset parse_csv(std::istream &in, std::optional<std::size_t> label_column = std::nullopt);

[[nodiscard]] LabeledDataset load_dataset(const std::filesystem::path &path, DataFormat format,
                                          std::optional<std::size_t> label_column = std::nullopt);

/**
 * Reads samples for prediction against a model of dimension `dimension`.
 *
 * LIBSVM lines whose first token is an `index:value` pair are unlabeled. CSV rows with exactly
 * `dimension` fields are unlabeled; rows with `dimension + 1` fields carry a label in
 * `label_column` (default last). Mixing labeled and unlabeled lines is a parse error.
 */
[[nodiscard]] SampleSet read_samples(const std::filesystem::path &path, DataFormat format, std::size_t dimension,
                                     std::optional<std::size_t> label_column = std::nullopt);

/// Writes `ds` in LIBSVM format with shortest round-trip decimal values; zeros are omitted.
void write_libsvm(std::ostream &out, const LabeledDataset &ds);

struct SplitSpec {
    double train_fraction{ 0.8 };
    std::uint64_t seed{ 0 };
    bool stratified{ true };
};

/// Random train/test partition. Stratified splits draw round(train_fraction * n_l) training
/// samples from every class (clamped to [1, n_l - 1]). Samples keep their original relative order.
[[nodiscard]] std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset &ds, const SplitSpec &spec);

/// Per-feature min-max scaling to [0, 1]. Constant features map to 0.
class MinMaxScaler {
  public:
    MinMaxScaler() = default;
    MinMaxScaler(std::vector<double> min, std::vector<double> max);

    [[nodiscard]] static MinMaxScaler fit(const LabeledDataset &ds);

    [[nodiscard]] FeatureVector transform(std::span<const double> x) const;
    [[nodiscard]] LabeledDataset transform(const LabeledDataset &ds) const;

    [[nodiscard]] const std::vector<double> &min() const noexcept { return min_; }
    [[nodiscard]] const std::vector<double> &max() const noexcept { return max_; }

  private:
    std::vector<double> min_;
    std::vector<double> max_;
};

}  // namespace dcsvm
