#include "dcsvm/dataset.hpp"

#include "dcsvm/error.hpp"
#include "dcsvm/random.hpp"
#include "text_util.hpp"

#include "fmt/core.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace dcsvm {

LabeledDataset::LabeledDataset(std::vector<LabeledSample> samples) :
    samples_{ std::move(samples) } {
    for (const LabeledSample &s : samples_) {
        labels_.push_back(s.label);
    }
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
    if (labels_.size() < 2) {
        throw CardinalityError{ fmt::format("dataset needs at least 2 classes, found {}", labels_.size()) };
    }
    index_samples();
}

LabeledDataset::LabeledDataset(std::vector<LabeledSample> samples, std::vector<int> class_labels) :
    samples_{ std::move(samples) },
    labels_{ std::move(class_labels) } {
    if (labels_.size() < 2) {
        throw CardinalityError{ fmt::format("dataset needs at least 2 classes, found {}", labels_.size()) };
    }
    if (!std::is_sorted(labels_.begin(), labels_.end()) || std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end()) {
        throw CardinalityError{ "class label index must be ascending and unique" };
    }
    index_samples();
}

void LabeledDataset::index_samples() {
    dimension_ = samples_.empty() ? 0 : samples_.front().features.size();
    class_of_.reserve(samples_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const LabeledSample &s = samples_[i];
        if (s.features.size() != dimension_) {
            throw DimensionError{ fmt::format("sample {} has dimension {}, expected {}", i, s.features.size(), dimension_) };
        }
        if (!std::all_of(s.features.begin(), s.features.end(), [](double v) { return std::isfinite(v); })) {
            throw NumericError{ fmt::format("sample {} has a non-finite feature value", i) };
        }
        class_of_.push_back(class_index(s.label));
    }
}

std::optional<std::size_t> LabeledDataset::find_class(int label) const noexcept {
    const auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t LabeledDataset::class_index(int label) const {
    if (const auto idx = find_class(label)) {
        return *idx;
    }
    throw ValidationError{ fmt::format("label {} is not in the class index", label) };
}

std::vector<std::vector<FeatureVector>> LabeledDataset::partition() const {
    std::vector<std::vector<FeatureVector>> parts(labels_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        parts[class_of_[i]].push_back(samples_[i].features);
    }
    return parts;
}

std::vector<std::size_t> LabeledDataset::class_sizes() const {
    std::vector<std::size_t> sizes(labels_.size(), 0);
    for (const std::size_t c : class_of_) {
        ++sizes[c];
    }
    return sizes;
}

DataFormat parse_data_format(std::string_view name) {
    if (name == "libsvm") {
        return DataFormat::libsvm;
    }
    if (name == "csv") {
        return DataFormat::csv;
    }
    throw ValidationError{ fmt::format("unknown data format '{}' (expected libsvm or csv)", name) };
}

namespace {

struct SparseRow {
    std::optional<int> label;
    std::vector<std::pair<std::size_t, double>> entries;  // 0-based index
};

std::string_view strip_comment(std::string_view line) {
    if (const auto pos = line.find('#'); pos != std::string_view::npos) {
        line = line.substr(0, pos);
    }
    return detail::trim(line);
}

int parse_label(std::string_view token, std::size_t line_no) {
    if (const auto v = detail::to_integer<int>(token)) {
        return *v;
    }
    // integral values written as reals, e.g. "3.0"
    if (const auto d = detail::to_double(token); d && std::isfinite(*d) && *d == std::trunc(*d) && std::abs(*d) < 2e9) {
        return static_cast<int>(*d);
    }
    throw ParseError{ fmt::format("invalid class label '{}'", token), line_no };
}

double parse_value(std::string_view token, std::size_t line_no) {
    const auto v = detail::to_double(token);
    if (!v) {
        throw ParseError{ fmt::format("invalid numeric value '{}'", token), line_no };
    }
    if (!std::isfinite(*v)) {
        throw ParseError{ fmt::format("non-finite value '{}'", token), line_no };
    }
    return *v;
}

SparseRow parse_libsvm_line(std::string_view line, std::size_t line_no) {
    const auto tokens = detail::split_whitespace(line);
    SparseRow row;
    std::size_t first = 0;
    if (tokens.front().find(':') == std::string_view::npos) {
        row.label = parse_label(tokens.front(), line_no);
        first = 1;
    }
    std::size_t previous = 0;
    for (std::size_t t = first; t < tokens.size(); ++t) {
        const std::string_view tok = tokens[t];
        const auto colon = tok.find(':');
        if (colon == std::string_view::npos) {
            throw ParseError{ fmt::format("expected index:value, got '{}'", tok), line_no };
        }
        const auto index = detail::to_integer<std::size_t>(tok.substr(0, colon));
        if (!index || *index == 0) {
            throw ParseError{ fmt::format("invalid feature index in '{}'", tok), line_no };
        }
        if (*index <= previous) {
            throw ParseError{ fmt::format("feature indices must be ascending ('{}')", tok), line_no };
        }
        previous = *index;
        row.entries.emplace_back(*index - 1, parse_value(tok.substr(colon + 1), line_no));
    }
    return row;
}

struct SparseFile {
    std::vector<SparseRow> rows;
    std::vector<std::size_t> line_numbers;
    std::size_t max_index{ 0 };  // 1-based largest index seen
};

SparseFile read_libsvm_rows(std::istream &in) {
    SparseFile file;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view content = strip_comment(line);
        if (content.empty()) {
            continue;
        }
        SparseRow row = parse_libsvm_line(content, line_no);
        if (!row.entries.empty()) {
            file.max_index = std::max(file.max_index, row.entries.back().first + 1);
        }
        file.rows.push_back(std::move(row));
        file.line_numbers.push_back(line_no);
    }
    return file;
}

FeatureVector densify(const SparseRow &row, std::size_t dimension) {
    FeatureVector x(dimension, 0.0);
    for (const auto &[index, value] : row.entries) {
        x[index] = value;
    }
    return x;
}

struct CsvTable {
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> line_numbers;
};

CsvTable read_csv_rows(std::istream &in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view content = detail::trim(line);
        if (content.empty()) {
            continue;
        }
        const auto fields = detail::split(content, ',');
        if (first_content) {
            first_content = false;
            const bool header = std::any_of(fields.begin(), fields.end(), [](std::string_view f) { return !detail::to_double(f); });
            if (header) {
                columns = fields.size();
                continue;
            }
        }
        if (columns == 0) {
            columns = fields.size();
        }
        if (fields.size() != columns) {
            throw DimensionError{ fmt::format("line {}: expected {} fields, found {}", line_no, columns, fields.size()) };
        }
        std::vector<double> values;
        values.reserve(fields.size());
        for (const std::string_view f : fields) {
            values.push_back(parse_value(f, line_no));
        }
        table.rows.push_back(std::move(values));
        table.line_numbers.push_back(line_no);
    }
    return table;
}

std::size_t resolve_label_column(std::optional<std::size_t> label_column, std::size_t columns) {
    const std::size_t col = label_column.value_or(columns - 1);
    if (col >= columns) {
        throw ValidationError{ fmt::format("label column {} out of range for {} columns", col, columns) };
    }
    return col;
}

int label_from_value(double v, std::size_t line_no) {
    if (v != std::trunc(v) || std::abs(v) > 2e9) {
        throw ParseError{ fmt::format("class label {} is not an integer", v), line_no };
    }
    return static_cast<int>(v);
}

std::ifstream open_input(const std::filesystem::path &path) {
    std::ifstream in{ path };
    if (!in) {
        throw FileError{ fmt::format("cannot open '{}'", path.string()) };
    }
    return in;
}

}  // namespace

LabeledDataset parse_libsvm(std::istream &in, std::optional<std::size_t> dimension) {
    const SparseFile file = read_libsvm_rows(in);
    if (dimension && *dimension < file.max_index) {
        throw DimensionError{ fmt::format("feature index {} exceeds dimension {}", file.max_index, *dimension) };
    }
    const std::size_t d = dimension.value_or(file.max_index);
    std::vector<LabeledSample> samples;
    samples.reserve(file.rows.size());
    for (std::size_t r = 0; r < file.rows.size(); ++r) {
        if (!file.rows[r].label) {
            throw ParseError{ "missing class label", file.line_numbers[r] };
        }
        samples.push_back({ densify(file.rows[r], d), *file.rows[r].label });
    }
    return LabeledDataset{ std::move(samples) };
}

LabeledDataset parse_csv(std::istream &in, std::optional<std::size_t> label_column) {
    const CsvTable table = read_csv_rows(in);
    if (table.rows.empty()) {
        throw CardinalityError{ "dataset needs at least 2 classes, found 0" };
    }
    const std::size_t columns = table.rows.front().size();
    if (columns < 2) {
        throw DimensionError{ "CSV needs a label column and at least one feature column" };
    }
    const std::size_t label_col = resolve_label_column(label_column, columns);
    std::vector<LabeledSample> samples;
    samples.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto &row = table.rows[r];
        LabeledSample s;
        s.label = label_from_value(row[label_col], table.line_numbers[r]);
        for (std::size_t c = 0; c < columns; ++c) {
            if (c != label_col) {
                s.features.push_back(row[c]);
            }
        }
        samples.push_back(std::move(s));
    }
    return LabeledDataset{ std::move(samples) };
}

LabeledDataset load_dataset(const std::filesystem::path &path, DataFormat format, std::optional<std::size_t> label_column) {
    std::ifstream in = open_input(path);
    return format == DataFormat::libsvm ? parse_libsvm(in) : parse_csv(in, label_column);
}

SampleSet read_samples(const std::filesystem::path &path, DataFormat format, std::size_t dimension,
                       std::optional<std::size_t> label_column) {
    std::ifstream in = open_input(path);
    SampleSet set;
    std::optional<bool> labeled;
    std::vector<int> labels;
    const auto note_labeled = [&](bool has_label, std::size_t line_no) {
        if (labeled && *labeled != has_label) {
            throw ParseError{ "mixes labeled and unlabeled samples", line_no };
        }
        labeled = has_label;
    };

    if (format == DataFormat::libsvm) {
        const SparseFile file = read_libsvm_rows(in);
        for (std::size_t r = 0; r < file.rows.size(); ++r) {
            const SparseRow &row = file.rows[r];
            if (!row.entries.empty() && row.entries.back().first >= dimension) {
                throw DimensionError{ fmt::format("line {}: feature index {} exceeds model dimension {}", file.line_numbers[r],
                                                  row.entries.back().first + 1, dimension) };
            }
            note_labeled(row.label.has_value(), file.line_numbers[r]);
            if (row.label) {
                labels.push_back(*row.label);
            }
            set.features.push_back(densify(row, dimension));
        }
    } else {
        const CsvTable table = read_csv_rows(in);
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto &row = table.rows[r];
            if (row.size() == dimension) {
                note_labeled(false, table.line_numbers[r]);
                set.features.push_back(row);
            } else if (row.size() == dimension + 1) {
                note_labeled(true, table.line_numbers[r]);
                const std::size_t label_col = resolve_label_column(label_column, row.size());
                labels.push_back(label_from_value(row[label_col], table.line_numbers[r]));
                FeatureVector x;
                for (std::size_t c = 0; c < row.size(); ++c) {
                    if (c != label_col) {
                        x.push_back(row[c]);
                    }
                }
                set.features.push_back(std::move(x));
            } else {
                throw DimensionError{ fmt::format("line {}: {} fields do not match model dimension {}", table.line_numbers[r],
                                                  row.size(), dimension) };
            }
        }
    }
    if (labeled.value_or(false)) {
        set.labels = std::move(labels);
    }
    return set;
}

void write_libsvm(std::ostream &out, const LabeledDataset &ds) {
    for (const LabeledSample &s : ds.samples()) {
        out << s.label;
        for (std::size_t i = 0; i < s.features.size(); ++i) {
            if (s.features[i] != 0.0) {
                out << ' ' << (i + 1) << ':' << detail::format_double(s.features[i]);
            }
        }
        out << '\n';
    }
}

std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset &ds, const SplitSpec &spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw ValidationError{ fmt::format("train fraction {} must lie in (0, 1)", spec.train_fraction) };
    }
    Rng rng{ spec.seed };
    std::vector<char> in_train(ds.size(), 0);

    const auto take = [&](std::vector<std::size_t> &members, std::size_t count) {
        rng.shuffle(std::span<std::size_t>{ members });
        for (std::size_t t = 0; t < count; ++t) {
            in_train[members[t]] = 1;
        }
    };

    if (spec.stratified) {
        std::vector<std::vector<std::size_t>> members(ds.class_count());
        for (std::size_t i = 0; i < ds.size(); ++i) {
            members[ds.class_of(i)].push_back(i);
        }
        for (std::size_t c = 0; c < members.size(); ++c) {
            const std::size_t n = members[c].size();
            if (n < 2) {
                throw SplitError{ fmt::format("class {} has {} sample(s); stratified splitting needs at least 2", ds.label_of(c), n) };
            }
            const auto wanted = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
            take(members[c], std::clamp<std::size_t>(wanted, 1, n - 1));
        }
    } else {
        if (ds.size() < 2) {
            throw SplitError{ "need at least 2 samples to split" };
        }
        std::vector<std::size_t> all(ds.size());
        for (std::size_t i = 0; i < all.size(); ++i) {
            all[i] = i;
        }
        const auto wanted = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(ds.size())));
        take(all, std::clamp<std::size_t>(wanted, 1, ds.size() - 1));
    }

    std::vector<LabeledSample> train;
    std::vector<LabeledSample> test;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        (in_train[i] ? train : test).push_back(ds[i]);
    }
    return { LabeledDataset{ std::move(train), ds.class_labels() }, LabeledDataset{ std::move(test), ds.class_labels() } };
}

MinMaxScaler::MinMaxScaler(std::vector<double> min, std::vector<double> max) :
    min_{ std::move(min) },
    max_{ std::move(max) } {
    if (min_.size() != max_.size()) {
        throw DimensionError{ "scaler min/max size mismatch" };
    }
}

MinMaxScaler MinMaxScaler::fit(const LabeledDataset &ds) {
    if (ds.empty()) {
        throw CardinalityError{ "cannot fit a scaler on an empty dataset" };
    }
    std::vector<double> lo = ds[0].features;
    std::vector<double> hi = ds[0].features;
    for (const LabeledSample &s : ds.samples()) {
        for (std::size_t f = 0; f < s.features.size(); ++f) {
            lo[f] = std::min(lo[f], s.features[f]);
            hi[f] = std::max(hi[f], s.features[f]);
        }
    }
    return MinMaxScaler{ std::move(lo), std::move(hi) };
}

FeatureVector MinMaxScaler::transform(std::span<const double> x) const {
    if (x.size() != min_.size()) {
        throw DimensionError{ fmt::format("scaler expects dimension {}, got {}", min_.size(), x.size()) };
    }
    FeatureVector out(x.size());
    for (std::size_t f = 0; f < x.size(); ++f) {
        const double range = max_[f] - min_[f];
        out[f] = range > 0.0 ? (x[f] - min_[f]) / range : 0.0;
    }
    return out;
}

LabeledDataset MinMaxScaler::transform(const LabeledDataset &ds) const {
    std::vector<LabeledSample> samples;
    samples.reserve(ds.size());
    for (const LabeledSample &s : ds.samples()) {
        samples.push_back({ transform(s.features), s.label });
    }
    return LabeledDataset{ std::move(samples), ds.class_labels() };
}

}  // namespace dcsvm
