#include "dcsvm/prediction_table.hpp"

#include "dcsvm/error.hpp"
#include "dcsvm/parallel.hpp"
#include "text_util.hpp"

#include "fmt/core.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace dcsvm {

namespace {

constexpr double chi_epsilon = 1e-12;

std::vector<ClassPair> all_pairs(std::span<const std::size_t> classes) {
    std::vector<ClassPair> pairs;
    for (std::size_t a = 0; a < classes.size(); ++a) {
        for (std::size_t b = a + 1; b < classes.size(); ++b) {
            pairs.push_back({ classes[a], classes[b] });
        }
    }
    return pairs;
}

}  // namespace

Threshold::Threshold(double fraction) :
    value_{ fraction } {
    if (!(fraction >= 0.0 && fraction < 1.0)) {
        throw ValidationError{ fmt::format("threshold {} must lie in [0, 1)", fraction) };
    }
}

Threshold Threshold::parse(std::string_view text) {
    std::string_view body = detail::trim(text);
    const bool percent = !body.empty() && body.back() == '%';
    if (percent) {
        body.remove_suffix(1);
    }
    const auto value = detail::to_double(body);
    if (!value || !std::isfinite(*value)) {
        throw ValidationError{ fmt::format("invalid threshold '{}'", text) };
    }
    return Threshold{ percent ? *value / 100.0 : *value };
}

int chi(Threshold theta, double x) noexcept {
    return x > theta.value() + chi_epsilon ? 1 : 0;
}

AllPredictionsTable::AllPredictionsTable(std::vector<ClassPair> rows, std::vector<std::size_t> columns,
                                         std::vector<std::vector<LikelihoodPair>> cells, std::vector<int> labels) :
    rows_{ std::move(rows) },
    columns_{ std::move(columns) },
    cells_{ std::move(cells) },
    labels_{ std::move(labels) } {
    if (!std::is_sorted(columns_.begin(), columns_.end()) || std::adjacent_find(columns_.begin(), columns_.end()) != columns_.end()) {
        throw ValidationError{ "table columns must be ascending and unique" };
    }
    if (!columns_.empty() && columns_.back() >= labels_.size()) {
        throw ValidationError{ "table column outside the label map" };
    }
    if (rows_ != all_pairs(columns_)) {
        throw ValidationError{ "table rows must be every class pair over the columns, in lexicographic order" };
    }
    if (cells_.size() != rows_.size()
        || std::any_of(cells_.begin(), cells_.end(), [&](const auto &row) { return row.size() != columns_.size(); })) {
        throw ValidationError{ "table cells do not match rows x columns" };
    }
}

std::optional<std::size_t> AllPredictionsTable::find_row(ClassPair pair) const noexcept {
    const auto it = std::lower_bound(rows_.begin(), rows_.end(), pair);
    if (it == rows_.end() || *it != pair) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - rows_.begin());
}

std::optional<std::size_t> AllPredictionsTable::find_column(std::size_t class_index) const noexcept {
    const auto it = std::lower_bound(columns_.begin(), columns_.end(), class_index);
    if (it == columns_.end() || *it != class_index) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - columns_.begin());
}

const LikelihoodPair &AllPredictionsTable::cell(ClassPair pair, std::size_t class_index) const {
    const auto row = find_row(pair);
    const auto column = find_column(class_index);
    if (!row || !column) {
        throw ValidationError{ fmt::format("no cell for svm_{{{},{}}} and class index {}", pair.i, pair.j, class_index) };
    }
    return cells_[*row][*column];
}

AllPredictionsTable AllPredictionsTable::restrict_to(std::span<const std::size_t> classes) const {
    std::vector<std::size_t> kept(classes.begin(), classes.end());
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    std::vector<std::size_t> column_pos;
    for (const std::size_t c : kept) {
        const auto pos = find_column(c);
        if (!pos) {
            throw ValidationError{ fmt::format("class index {} is not a column of the table", c) };
        }
        column_pos.push_back(*pos);
    }
    std::vector<ClassPair> rows = all_pairs(kept);
    std::vector<std::vector<LikelihoodPair>> cells;
    cells.reserve(rows.size());
    for (const ClassPair &pair : rows) {
        const std::size_t r = *find_row(pair);
        std::vector<LikelihoodPair> row;
        row.reserve(column_pos.size());
        for (const std::size_t c : column_pos) {
            row.push_back(cells_[r][c]);
        }
        cells.push_back(std::move(row));
    }
    return AllPredictionsTable{ std::move(rows), std::move(kept), std::move(cells), labels_ };
}

LikelihoodPair compute_likelihoods(const BinarySvmModel &model, std::span<const FeatureVector> class_samples) {
    if (class_samples.empty()) {
        throw CardinalityError{ fmt::format("likelihoods of svm_{{{},{}}} need a non-empty class", model.pair.i, model.pair.j) };
    }
    std::size_t toward_i = 0;
    for (const FeatureVector &x : class_samples) {
        if (model.predicts_i(x)) {
            ++toward_i;
        }
    }
    return LikelihoodPair::from_fraction(static_cast<double>(toward_i) / static_cast<double>(class_samples.size()));
}

AllPredictionsTable build_all_predictions_table(std::span<const BinarySvmModel> models, std::span<const std::vector<FeatureVector>> partitions,
                                                std::vector<int> labels, std::size_t threads) {
    const std::size_t k = partitions.size();
    if (labels.size() != k) {
        throw ValidationError{ fmt::format("{} labels given for {} classes", labels.size(), k) };
    }
    for (std::size_t l = 0; l < k; ++l) {
        if (partitions[l].empty()) {
            throw CardinalityError{ fmt::format("class {} has no training samples", labels[l]) };
        }
    }
    std::map<ClassPair, const BinarySvmModel *> by_pair;
    for (const BinarySvmModel &m : models) {
        by_pair[m.pair] = &m;
    }
    std::vector<std::size_t> columns(k);
    for (std::size_t l = 0; l < k; ++l) {
        columns[l] = l;
    }
    std::vector<ClassPair> rows = all_pairs(columns);
    std::vector<const BinarySvmModel *> row_models;
    for (const ClassPair &pair : rows) {
        const auto it = by_pair.find(pair);
        if (it == by_pair.end()) {
            throw ValidationError{ fmt::format("missing classifier for pair ({}, {})", labels[pair.i], labels[pair.j]) };
        }
        row_models.push_back(it->second);
    }

    std::vector<std::vector<LikelihoodPair>> cells(rows.size(), std::vector<LikelihoodPair>(k));
    parallel_for(rows.size() * k, threads, [&](std::size_t cell) {
        const std::size_t r = cell / k;
        const std::size_t l = cell % k;
        cells[r][l] = compute_likelihoods(*row_models[r], partitions[l]);
    });
    return AllPredictionsTable{ std::move(rows), std::move(columns), std::move(cells), std::move(labels) };
}

namespace {

std::size_t require_row(const AllPredictionsTable &table, ClassPair pair) {
    const auto row = table.find_row(pair);
    if (!row) {
        throw ValidationError{ fmt::format("svm_{{{},{}}} is not a row of the table", pair.i, pair.j) };
    }
    return *row;
}

struct ChiSums {
    int toward_i{ 0 };
    int toward_j{ 0 };
    int undecided{ 0 };
};

ChiSums chi_sums(const AllPredictionsTable &table, ClassPair pair, Threshold theta) {
    const std::size_t r = require_row(table, pair);
    ChiSums sums;
    for (std::size_t c = 0; c < table.class_count(); ++c) {
        const int ci = chi(theta, table.cell_at(r, c).toward_i);
        const int cj = chi(theta, table.cell_at(r, c).toward_j);
        sums.toward_i += ci;
        sums.toward_j += cj;
        sums.undecided += ci * cj;
    }
    return sums;
}

}  // namespace

int purity_index(const AllPredictionsTable &table, ClassPair row, Threshold theta) {
    // equals sum(chi_i + chi_j) - k whenever theta < 0.5; above that a cell can have both
    // likelihoods at or below theta and the sum formula would go negative
    return chi_sums(table, row, theta).undecided;
}

int balance_index(const AllPredictionsTable &table, ClassPair row, Threshold theta) {
    const ChiSums sums = chi_sums(table, row, theta);
    const int k = static_cast<int>(table.class_count());
    return std::min(k - sums.toward_j, k - sums.toward_i);
}

double score(const AllPredictionsTable &table, ClassPair row) {
    return (table.cell(row, row.i).toward_i + table.cell(row, row.j).toward_j) / 2.0;
}

std::size_t separated_cell_count(const AllPredictionsTable &table, Threshold theta) {
    std::size_t count = 0;
    for (std::size_t r = 0; r < table.rows().size(); ++r) {
        for (std::size_t c = 0; c < table.class_count(); ++c) {
            const LikelihoodPair &cell = table.cell_at(r, c);
            // max(p, q) >= 1 - theta  <=>  min(p, q) <= theta, since p + q = 1
            if (chi(theta, std::min(cell.toward_i, cell.toward_j)) == 0) {
                ++count;
            }
        }
    }
    return count;
}

double separation_percentage(const AllPredictionsTable &table, Threshold theta) {
    const std::size_t cells = table.rows().size() * table.class_count();
    if (cells == 0) {
        throw ValidationError{ "separation percentage of an empty table" };
    }
    return static_cast<double>(separated_cell_count(table, theta)) / static_cast<double>(cells);
}

std::string pair_name(const AllPredictionsTable &table, ClassPair pair) {
    return fmt::format("svm_{{{},{}}}", table.labels().at(pair.i), table.labels().at(pair.j));
}

void write_table_text(std::ostream &out, const AllPredictionsTable &table) {
    std::vector<std::string> names;
    std::size_t name_width = 3;
    for (const ClassPair &pair : table.rows()) {
        names.push_back(pair_name(table, pair));
        name_width = std::max(name_width, names.back().size());
    }
    constexpr std::size_t cell_width = 11;
    out << fmt::format("{:<{}}", "", name_width);
    for (const std::size_t c : table.columns()) {
        out << fmt::format(" {:>{}}", table.labels()[c], cell_width);
    }
    out << '\n';
    for (std::size_t r = 0; r < table.rows().size(); ++r) {
        out << fmt::format("{:<{}}", names[r], name_width);
        for (std::size_t c = 0; c < table.class_count(); ++c) {
            const LikelihoodPair &cell = table.cell_at(r, c);
            out << fmt::format(" {:>{}}", fmt::format("{:.1f}/{:.1f}", 100.0 * cell.toward_i, 100.0 * cell.toward_j), cell_width);
        }
        out << '\n';
    }
}

void write_table_csv(std::ostream &out, const AllPredictionsTable &table) {
    out << "row_i,row_j,class,toward_i,toward_j\n";
    for (std::size_t r = 0; r < table.rows().size(); ++r) {
        const ClassPair pair = table.rows()[r];
        for (std::size_t c = 0; c < table.class_count(); ++c) {
            const LikelihoodPair &cell = table.cell_at(r, c);
            out << table.labels()[pair.i] << ',' << table.labels()[pair.j] << ',' << table.labels()[table.columns()[c]] << ','
                << detail::format_double(cell.toward_i) << ',' << detail::format_double(cell.toward_j) << '\n';
        }
    }
}

}  // namespace dcsvm
