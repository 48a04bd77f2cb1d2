#pragma once

#include "dcsvm/svm.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dcsvm {

/// Fractions of one class's samples that a pair classifier labels i and j.
struct LikelihoodPair {
    double toward_i{ 0.0 };
    double toward_j{ 1.0 };

    /// toward_j is derived as 1 - toward_i, so the pair always sums to one.
    [[nodiscard]] static LikelihoodPair from_fraction(double toward_i) { return { toward_i, 1.0 - toward_i }; }

    bool operator==(const LikelihoodPair &) const = default;
};

/// Accuracy threshold theta in [0, 1), stored as a fraction (2% is 0.02).
class Threshold {
  public:
    constexpr Threshold() = default;
    /// Throws `ValidationError` outside [0, 1).
    explicit Threshold(double fraction);

    /// Accepts "0.02" or "2%".
    [[nodiscard]] static Threshold parse(std::string_view text);

    [[nodiscard]] constexpr double value() const noexcept { return value_; }

    auto operator<=>(const Threshold &) const = default;

  private:
    double value_{ 0.0 };
};

/// chi_theta(x): 1 iff x > theta. Likelihoods are count ratios, so differences under 1e-12 are
/// treated as rounding noise (1 - 0.98 must not count as above theta = 0.02).
[[nodiscard]] int chi(Threshold theta, double x) noexcept;

/**
 * The All-Predictions table: one row per pair classifier over the active classes, one column per
 * active class, and in each cell the likelihood pair of that classifier on that class's training
 * samples.
 *
 * Rows are kept in lexicographic (i, j) order; that order is also the final tie-break when a
 * row is selected. Class indices are internal; `labels` maps them to external class ids.
 */
class AllPredictionsTable {
  public:
    AllPredictionsTable() = default;

    /// `cells[r][c]` belongs to `rows[r]` and `columns[c]`. Rows must be exactly all pairs over
    /// `columns` in lexicographic order; `labels` covers every internal index.
    AllPredictionsTable(std::vector<ClassPair> rows, std::vector<std::size_t> columns, std::vector<std::vector<LikelihoodPair>> cells,
                        std::vector<int> labels);

    [[nodiscard]] const std::vector<ClassPair> &rows() const noexcept { return rows_; }
    [[nodiscard]] const std::vector<std::size_t> &columns() const noexcept { return columns_; }
    [[nodiscard]] const std::vector<int> &labels() const noexcept { return labels_; }
    [[nodiscard]] std::size_t class_count() const noexcept { return columns_.size(); }
    [[nodiscard]] bool empty() const noexcept { return rows_.empty(); }

    [[nodiscard]] std::optional<std::size_t> find_row(ClassPair pair) const noexcept;
    [[nodiscard]] std::optional<std::size_t> find_column(std::size_t class_index) const noexcept;

    /// T[svm_{i,j}, l]. Throws `ValidationError` for a row or column not in the table.
    [[nodiscard]] const LikelihoodPair &cell(ClassPair pair, std::size_t class_index) const;
    [[nodiscard]] const LikelihoodPair &cell_at(std::size_t row, std::size_t column) const { return cells_[row][column]; }

    /// The table restricted to `classes`: columns outside the set are dropped, and only rows
    /// whose two classes both survive are kept.
    [[nodiscard]] AllPredictionsTable restrict_to(std::span<const std::size_t> classes) const;

    bool operator==(const AllPredictionsTable &) const = default;

  private:
    std::vector<ClassPair> rows_;
    std::vector<std::size_t> columns_;
    std::vector<std::vector<LikelihoodPair>> cells_;
    std::vector<int> labels_;
};

/// C_{i,j}(l, .) for the samples of class l. Throws `CardinalityError` when `class_samples` is empty.
[[nodiscard]] LikelihoodPair compute_likelihoods(const BinarySvmModel &model, std::span<const FeatureVector> class_samples);

/// Full table over all classes of `partitions` (indexed by internal class). `models` needs one
/// classifier per unordered pair, in any order. Cells are computed on up to `threads` threads.
[[nodiscard]] AllPredictionsTable build_all_predictions_table(std::span<const BinarySvmModel> models,
                                                              std::span<const std::vector<FeatureVector>> partitions,
                                                              std::vector<int> labels, std::size_t threads = 1);

/// P_{i,j}(theta): number of active classes with both likelihoods above theta.
[[nodiscard]] int purity_index(const AllPredictionsTable &table, ClassPair row, Threshold theta);

/// B_{i,j}(theta) = min(k - sum chi(C(l,j)), k - sum chi(C(l,i))).
[[nodiscard]] int balance_index(const AllPredictionsTable &table, ClassPair row, Threshold theta);

/// S_{i,j} = (C_{i,j}(i,i) + C_{i,j}(j,j)) / 2.
[[nodiscard]] double score(const AllPredictionsTable &table, ClassPair row);

/// Number of cells with max(toward_i, toward_j) >= 1 - theta.
[[nodiscard]] std::size_t separated_cell_count(const AllPredictionsTable &table, Threshold theta);

/// `separated_cell_count` over the number of cells (rows x columns).
[[nodiscard]] double separation_percentage(const AllPredictionsTable &table, Threshold theta);

/// Fig. 2 style grid: rows "svm_{i,j}", columns external labels, cells "p/q" in percent.
void write_table_text(std::ostream &out, const AllPredictionsTable &table);
/// One line per cell: row_i,row_j,class,toward_i,toward_j (external labels).
void write_table_csv(std::ostream &out, const AllPredictionsTable &table);

/// Row name with external labels, e.g. "svm_{5,6}".
[[nodiscard]] std::string pair_name(const AllPredictionsTable &table, ClassPair pair);

}  // namespace dcsvm
