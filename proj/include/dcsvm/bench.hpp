#pragma once

#include "dcsvm/dataset.hpp"
#include "dcsvm/dcsvm_tree.hpp"
#include "dcsvm/kernel.hpp"
#include "dcsvm/prediction_table.hpp"
#include "dcsvm/svm.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dcsvm {

enum class Method { dcsvm, ovo, dag, ovr };

[[nodiscard]] std::string_view to_string(Method method) noexcept;
/// Throws `ValidationError` listing the valid names.
[[nodiscard]] Method parse_method(std::string_view name);
/// Comma separated list, e.g. "dcsvm,ovo,dag".
[[nodiscard]] std::vector<Method> parse_method_list(std::string_view names);

struct TrialConfig {
    std::string dataset_name;
    std::vector<Method> methods{ Method::dcsvm, Method::ovo, Method::dag };
    std::vector<Threshold> thetas{ Threshold{ 0.0 } };
    std::size_t trials{ 10 };
    /// `split.seed` is the base seed; trial t splits with seed + t.
    SplitSpec split{};
    KernelSpec kernel{};
    /// Use gamma = 1 / d for rbf and polynomial kernels instead of `kernel.gamma`.
    bool auto_gamma{ true };
    SvmHyperParams hp{};
    SelectionStrategy strategy{ SelectionStrategy::balanced };
    /// Min-max scale features, fitted on each training split.
    bool scale{ false };
    std::size_t threads{ 1 };
    /// Zero the timing columns so reports are reproducible byte for byte.
    bool record_timing{ true };

    void validate() const;
};

/// One report line: a method, and for DCSVM a threshold.
struct ReportRow {
    std::string dataset;
    Method method{ Method::dcsvm };
    std::optional<Threshold> theta;
    double accuracy{ 0.0 };
    double avg_steps{ 0.0 };
    double avg_svs{ 0.0 };
    double train_s{ 0.0 };
    double predict_s{ 0.0 };
    /// Mean separation percentage of the training table (DCSVM rows of a sweep).
    std::optional<double> separation;
    std::vector<double> trial_accuracy;
    std::vector<double> trial_steps;
};

struct EvalReport {
    std::size_t class_count{ 0 };
    std::size_t trials{ 0 };
    std::vector<ReportRow> rows;

    [[nodiscard]] const ReportRow *find(Method method, std::optional<Threshold> theta = std::nullopt) const;
};

/**
 * Repeated random train/test resampling. Every trial splits with its own derived seed, trains
 * the pair classifiers once and shares them between DCSVM (one tree per theta), one-vs-one and
 * DAGSVM; one-vs-rest trains its own classifiers. Metrics are averaged over trials. A failing
 * trial is reported with its index.
 */
[[nodiscard]] EvalReport run_trials(const LabeledDataset &ds, const TrialConfig &cfg);

/// DCSVM rows for each theta in `thetas` (at least two), with the separation percentage of the
/// training table at that theta.
[[nodiscard]] EvalReport threshold_sweep(const LabeledDataset &ds, TrialConfig cfg, const std::vector<Threshold> &thetas);

/// Resolves gamma = 1 / d when `cfg.auto_gamma` is set.
[[nodiscard]] KernelSpec resolve_kernel(const KernelSpec &kernel, bool auto_gamma, std::size_t dimension);

/// Aligned columns: dataset, method, theta, accuracy, avg_steps, avg_svs, train_s, predict_s
/// (plus separation when any row has it).
void write_report_text(std::ostream &out, const EvalReport &report);
/// Comma separated with a header line, same columns.
void write_report_csv(std::ostream &out, const EvalReport &report);

}  // namespace dcsvm
