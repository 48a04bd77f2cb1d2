#include "dcsvm/bench.hpp"

#include "dcsvm/baselines.hpp"
#include "dcsvm/error.hpp"
#include "dcsvm/parallel.hpp"
#include "text_util.hpp"

#include "fmt/core.h"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <ostream>

namespace dcsvm {

namespace {

constexpr std::string_view valid_methods = "dcsvm, ovo, dag, ovr";

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double mean(const std::vector<double> &values) {
    return values.empty() ? 0.0 : std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

// Metrics of one method (and theta) in one trial.
struct Measurement {
    double accuracy{ 0.0 };
    double avg_steps{ 0.0 };
    double avg_svs{ 0.0 };
    double train_s{ 0.0 };
    double predict_s{ 0.0 };
    double separation{ 0.0 };
};

struct RowKey {
    Method method;
    std::optional<Threshold> theta;
};

std::vector<RowKey> row_keys(const TrialConfig &cfg) {
    std::vector<RowKey> keys;
    for (const Method m : cfg.methods) {
        if (m == Method::dcsvm) {
            for (const Threshold theta : cfg.thetas) {
                keys.push_back({ m, theta });
            }
        } else {
            keys.push_back({ m, std::nullopt });
        }
    }
    return keys;
}

template <typename Predict>
Measurement evaluate(const LabeledDataset &test, Predict &&predict) {
    Measurement m;
    std::size_t correct = 0;
    double steps = 0.0;
    double svs = 0.0;
    const auto start = Clock::now();
    for (const LabeledSample &s : test.samples()) {
        const auto [label, step_count, sv_count] = predict(s.features);
        correct += label == s.label ? 1 : 0;
        steps += static_cast<double>(step_count);
        svs += static_cast<double>(sv_count);
    }
    m.predict_s = seconds_since(start);
    const double n = static_cast<double>(test.size());
    m.accuracy = static_cast<double>(correct) / n;
    m.avg_steps = steps / n;
    m.avg_svs = svs / n;
    return m;
}

struct Outcome {
    int label;
    std::size_t steps;
    std::size_t svs;
};

std::vector<Measurement> run_one_trial(const LabeledDataset &ds, const TrialConfig &cfg, std::size_t trial, const std::vector<RowKey> &keys) {
    SplitSpec spec = cfg.split;
    spec.seed = cfg.split.seed + trial;
    auto [train, test] = stratified_split(ds, spec);
    if (cfg.scale) {
        const MinMaxScaler scaler = MinMaxScaler::fit(train);
        train = scaler.transform(train);
        test = scaler.transform(test);
    }
    if (test.empty()) {
        throw SplitError{ "test split is empty" };
    }
    const KernelSpec kernel = resolve_kernel(cfg.kernel, cfg.auto_gamma, ds.dimension());
    const bool needs_pairs = std::any_of(keys.begin(), keys.end(), [](const RowKey &k) { return k.method != Method::ovr; });

    std::vector<BinarySvmModel> pairs;
    double pair_train_s = 0.0;
    std::optional<OvoModel> ovo;
    if (needs_pairs) {
        const auto start = Clock::now();
        pairs = train_pair_classifiers(train, kernel, cfg.hp);
        pair_train_s = seconds_since(start);
        ovo = make_ovo_model(train.class_labels(), pairs);
    }
    std::optional<AllPredictionsTable> table;
    double table_s = 0.0;
    std::optional<OvrModel> ovr;
    double ovr_train_s = 0.0;

    std::vector<Measurement> results;
    for (const RowKey &key : keys) {
        Measurement m;
        switch (key.method) {
            case Method::dcsvm: {
                if (!table) {
                    const auto start = Clock::now();
                    table = build_all_predictions_table(pairs, train.partition(), train.class_labels());
                    table_s = seconds_since(start);
                }
                const auto start = Clock::now();
                const DcsvmModel model = make_dcsvm_model(pairs, *table, *key.theta, cfg.strategy);
                const double tree_s = seconds_since(start);
                m = evaluate(test, [&](const FeatureVector &x) {
                    const DcsvmPrediction p = classify(model, x);
                    return Outcome{ p.label, p.steps, p.support_vectors };
                });
                m.train_s = pair_train_s + table_s + tree_s;
                m.separation = separation_percentage(*table, *key.theta);
                break;
            }
            case Method::ovo:
                m = evaluate(test, [&](const FeatureVector &x) {
                    const OvoPrediction p = ovo_predict(*ovo, x);
                    return Outcome{ p.label, p.evaluations, p.support_vectors };
                });
                m.train_s = pair_train_s;
                break;
            case Method::dag:
                m = evaluate(test, [&](const FeatureVector &x) {
                    const DagPrediction p = dag_predict(*ovo, x);
                    return Outcome{ p.label, p.steps, p.support_vectors };
                });
                m.train_s = pair_train_s;
                break;
            case Method::ovr:
                if (!ovr) {
                    const auto start = Clock::now();
                    ovr = train_ovr(train, kernel, cfg.hp);
                    ovr_train_s = seconds_since(start);
                }
                m = evaluate(test, [&](const FeatureVector &x) {
                    const OvrPrediction p = ovr_predict(*ovr, x);
                    return Outcome{ p.label, ovr->class_count(), p.support_vectors };
                });
                m.train_s = ovr_train_s;
                break;
        }
        if (!cfg.record_timing) {
            m.train_s = 0.0;
            m.predict_s = 0.0;
        }
        results.push_back(m);
    }
    return results;
}

}  // namespace

std::string_view to_string(Method method) noexcept {
    switch (method) {
        case Method::dcsvm:
            return "dcsvm";
        case Method::ovo:
            return "ovo";
        case Method::dag:
            return "dag";
        case Method::ovr:
            return "ovr";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    for (const Method m : { Method::dcsvm, Method::ovo, Method::dag, Method::ovr }) {
        if (to_string(m) == name) {
            return m;
        }
    }
    throw ValidationError{ fmt::format("unknown method '{}' (valid methods: {})", name, valid_methods) };
}

std::vector<Method> parse_method_list(std::string_view names) {
    std::vector<Method> methods;
    for (const std::string_view name : detail::split(names, ',')) {
        const Method m = parse_method(detail::trim(name));
        if (std::find(methods.begin(), methods.end(), m) == methods.end()) {
            methods.push_back(m);
        }
    }
    return methods;
}

void TrialConfig::validate() const {
    if (trials == 0) {
        throw ValidationError{ "trials must be at least 1" };
    }
    if (methods.empty()) {
        throw ValidationError{ fmt::format("no methods requested (valid methods: {})", valid_methods) };
    }
    if (std::find(methods.begin(), methods.end(), Method::dcsvm) != methods.end() && thetas.empty()) {
        throw ValidationError{ "dcsvm needs at least one threshold" };
    }
    if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0)) {
        throw ValidationError{ fmt::format("train fraction {} must lie in (0, 1)", split.train_fraction) };
    }
    if (!auto_gamma || kernel.kind == KernelKind::linear) {
        kernel.validate();
    }
    hp.validate();
}

KernelSpec resolve_kernel(const KernelSpec &kernel, bool auto_gamma, std::size_t dimension) {
    KernelSpec resolved = kernel;
    if (auto_gamma && kernel.kind != KernelKind::linear) {
        resolved.gamma = 1.0 / static_cast<double>(std::max<std::size_t>(dimension, 1));
    }
    resolved.validate();
    return resolved;
}

const ReportRow *EvalReport::find(Method method, std::optional<Threshold> theta) const {
    for (const ReportRow &row : rows) {
        if (row.method == method && row.theta == theta) {
            return &row;
        }
    }
    return nullptr;
}

EvalReport run_trials(const LabeledDataset &ds, const TrialConfig &cfg) {
    cfg.validate();
    const std::vector<RowKey> keys = row_keys(cfg);
    std::vector<std::vector<Measurement>> per_trial(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
        try {
            per_trial[t] = run_one_trial(ds, cfg, t, keys);
        } catch (const SplitError &e) {
            throw SplitError{ fmt::format("trial {}: {}", t, e.what()) };
        } catch (const Error &e) {
            throw Error{ fmt::format("trial {}: {}", t, e.what()) };
        }
    });

    EvalReport report;
    report.class_count = ds.class_count();
    report.trials = cfg.trials;
    for (std::size_t r = 0; r < keys.size(); ++r) {
        ReportRow row;
        row.dataset = cfg.dataset_name;
        row.method = keys[r].method;
        row.theta = keys[r].theta;
        std::vector<double> svs;
        std::vector<double> train_s;
        std::vector<double> predict_s;
        std::vector<double> separation;
        for (const auto &trial : per_trial) {
            const Measurement &m = trial[r];
            row.trial_accuracy.push_back(m.accuracy);
            row.trial_steps.push_back(m.avg_steps);
            svs.push_back(m.avg_svs);
            train_s.push_back(m.train_s);
            predict_s.push_back(m.predict_s);
            separation.push_back(m.separation);
        }
        row.accuracy = mean(row.trial_accuracy);
        row.avg_steps = mean(row.trial_steps);
        row.avg_svs = mean(svs);
        row.train_s = mean(train_s);
        row.predict_s = mean(predict_s);
        if (row.method == Method::dcsvm) {
            row.separation = mean(separation);
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

EvalReport threshold_sweep(const LabeledDataset &ds, TrialConfig cfg, const std::vector<Threshold> &thetas) {
    if (thetas.size() < 2) {
        throw ValidationError{ "a threshold sweep needs at least 2 thresholds" };
    }
    cfg.methods = { Method::dcsvm };
    cfg.thetas = thetas;
    return run_trials(ds, cfg);
}

namespace {

struct Columns {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> cells;
};

Columns tabulate(const EvalReport &report) {
    const bool with_separation = std::any_of(report.rows.begin(), report.rows.end(), [](const ReportRow &r) { return r.separation.has_value(); });
    Columns cols;
    cols.header = { "dataset", "method", "theta", "accuracy", "avg_steps", "avg_svs", "train_s", "predict_s" };
    if (with_separation) {
        cols.header.emplace_back("separation");
    }
    for (const ReportRow &row : report.rows) {
        std::vector<std::string> line{
            row.dataset,
            std::string{ to_string(row.method) },
            row.theta ? detail::format_double(row.theta->value()) : std::string{},
            fmt::format("{:.4f}", row.accuracy),
            fmt::format("{:.3f}", row.avg_steps),
            fmt::format("{:.2f}", row.avg_svs),
            fmt::format("{:.6f}", row.train_s),
            fmt::format("{:.6f}", row.predict_s),
        };
        if (with_separation) {
            line.push_back(row.separation ? fmt::format("{:.4f}", *row.separation) : std::string{});
        }
        cols.cells.push_back(std::move(line));
    }
    return cols;
}

}  // namespace

void write_report_text(std::ostream &out, const EvalReport &report) {
    const Columns cols = tabulate(report);
    std::vector<std::size_t> width(cols.header.size());
    for (std::size_t c = 0; c < width.size(); ++c) {
        width[c] = cols.header[c].size();
        for (const auto &line : cols.cells) {
            width[c] = std::max(width[c], line[c].size());
        }
    }
    const auto emit = [&](const std::vector<std::string> &line) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            // text columns left aligned, numbers right aligned
            out << (c == 0 ? "" : "  ") << (c < 2 ? fmt::format("{:<{}}", line[c], width[c]) : fmt::format("{:>{}}", line[c], width[c]));
        }
        out << '\n';
    };
    emit(cols.header);
    for (const auto &line : cols.cells) {
        emit(line);
    }
}

void write_report_csv(std::ostream &out, const EvalReport &report) {
    const Columns cols = tabulate(report);
    const auto emit = [&](const std::vector<std::string> &line) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            out << (c == 0 ? "" : ",") << line[c];
        }
        out << '\n';
    };
    emit(cols.header);
    for (const auto &line : cols.cells) {
        emit(line);
    }
}

}  // namespace dcsvm
