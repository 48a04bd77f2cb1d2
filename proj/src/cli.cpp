#include "dcsvm/cli.hpp"

#include "dcsvm/baselines.hpp"
#include "dcsvm/bench.hpp"
#include "dcsvm/error.hpp"
#include "dcsvm/model_io.hpp"
#include "text_util.hpp"

#include "CLI11.hpp"
#include "fmt/core.h"

#include <filesystem>
#include <optional>
#include <ostream>

namespace dcsvm {

namespace {

// Flags shared by every command that trains classifiers.
struct TrainingFlags {
    std::string data;
    std::string format{ "libsvm" };
    std::optional<std::size_t> label_column;
    std::string kernel{ "rbf" };
    std::optional<double> gamma;
    int degree{ 3 };
    double coef0{ 0.0 };
    double cost{ 1.0 };
    double tol{ 1e-3 };
    std::size_t max_iterations{ 1'000'000 };
    bool scale{ false };
    std::string strategy{ "balanced" };
    std::size_t threads{ 1 };

    void attach(CLI::App &cmd) {
        cmd.add_option("--data", data, "Training data file")->required();
        cmd.add_option("--format", format, "Data format: libsvm or csv")->capture_default_str();
        cmd.add_option("--label-column", label_column, "CSV label column (0-based, default last)");
        cmd.add_option("--kernel", kernel, "Kernel: linear, rbf or poly")->capture_default_str();
        cmd.add_option("--gamma", gamma, "Kernel gamma (default 1/d)");
        cmd.add_option("--degree", degree, "Polynomial degree")->capture_default_str();
        cmd.add_option("--coef0", coef0, "Polynomial coef0")->capture_default_str();
        cmd.add_option("-C,--cost", cost, "Soft-margin cost C")->capture_default_str();
        cmd.add_option("--tol", tol, "KKT tolerance of the SMO solver")->capture_default_str();
        cmd.add_option("--max-iter", max_iterations, "SMO iteration bound")->capture_default_str();
        cmd.add_flag("--scale", scale, "Min-max scale features to [0,1] using the training data");
        cmd.add_option("--strategy", strategy, "Row selection: balanced or accuracy")->capture_default_str();
        cmd.add_option("--threads", threads, "Worker threads")->capture_default_str();
    }

    [[nodiscard]] KernelSpec kernel_spec() const {
        KernelSpec spec;
        spec.kind = parse_kernel_kind(kernel);
        spec.gamma = gamma.value_or(1.0);
        spec.degree = degree;
        spec.coef0 = coef0;
        return spec;
    }

    [[nodiscard]] SvmHyperParams hyper_params() const {
        SvmHyperParams hp{ cost, tol, max_iterations };
        hp.validate();
        return hp;
    }

    [[nodiscard]] LabeledDataset load() const {
        require_file(data);
        return load_dataset(data, parse_data_format(format), label_column);
    }

    static void require_file(const std::string &path) {
        if (!std::filesystem::exists(path)) {
            throw FileError{ fmt::format("file not found: '{}'", path) };
        }
    }
};

std::vector<Threshold> parse_thresholds(const std::vector<std::string> &texts) {
    std::vector<Threshold> thetas;
    for (const std::string &text : texts) {
        for (const std::string_view part : detail::split(text, ',')) {
            if (!detail::trim(part).empty()) {
                thetas.push_back(Threshold::parse(part));
            }
        }
    }
    return thetas;
}

std::string percent(double fraction) {
    return fmt::format("{:.1f}%", 100.0 * fraction);
}

void print_measures(std::ostream &out, const AllPredictionsTable &table, Threshold theta) {
    out << fmt::format("{:>4}  {:<12} {:>3} {:>3} {:>7}\n", "", "svm", "P", "B", "S");
    for (std::size_t r = 0; r < table.rows().size(); ++r) {
        const ClassPair pair = table.rows()[r];
        out << fmt::format("{:>4}  {:<12} {:>3} {:>3} {:>7}\n", fmt::format("{}.", r + 1), pair_name(table, pair), purity_index(table, pair, theta),
                           balance_index(table, pair, theta), percent(score(table, pair)));
    }
}

int cmd_train(const TrainingFlags &flags, const std::string &theta_text, const std::string &out_path, std::ostream &out) {
    const Threshold theta = Threshold::parse(theta_text);
    const SelectionStrategy strategy = parse_selection_strategy(flags.strategy);
    const SvmHyperParams hp = flags.hyper_params();
    LabeledDataset ds = flags.load();

    ModelFile file;
    file.dimension = ds.dimension();
    if (flags.scale) {
        file.scaler = MinMaxScaler::fit(ds);
        ds = file.scaler->transform(ds);
    }
    file.kernel = resolve_kernel(flags.kernel_spec(), !flags.gamma.has_value(), ds.dimension());
    file.hp = hp;

    std::vector<BinarySvmModel> pairs = train_pair_classifiers(ds, file.kernel, hp, flags.threads);
    AllPredictionsTable table = build_all_predictions_table(pairs, ds.partition(), ds.class_labels(), flags.threads);
    file.model = make_dcsvm_model(std::move(pairs), std::move(table), theta, strategy);

    const DcsvmModel &model = file.model;
    out << fmt::format("dataset: {} ({} samples, {} features, {} classes)\n", flags.data, ds.size(), ds.dimension(), ds.class_count());
    out << fmt::format("kernel: {}  C={}  tol={}\n", describe(file.kernel), hp.C, hp.tol);
    out << fmt::format("theta: {}  strategy: {}\n", detail::format_double(theta.value()), to_string(strategy));
    out << fmt::format("all-predictions table: {} rows x {} columns, separation {}\n", model.table.rows().size(), model.table.class_count(),
                       percent(separation_percentage(model.table, theta)));
    out << "pair scores:\n";
    for (const BinarySvmModel &m : model.classifiers) {
        out << fmt::format("  {:<12} {:>7}  svs={}{}\n", pair_name(model.table, m.pair), percent(score(model.table, m.pair)),
                           m.support_vector_count(), m.converged ? "" : "  (not converged)");
    }
    out << fmt::format("tree depth: {}\n", model.tree.depth());
    model.tree.render(out, model.labels);
    save_model(out_path, file);
    out << fmt::format("model written to {}\n", out_path);
    return exit_success;
}

int cmd_predict(const std::string &model_path, const std::string &data_path, const std::string &format,
                std::optional<std::size_t> label_column, bool trace, std::ostream &out) {
    TrainingFlags::require_file(model_path);
    TrainingFlags::require_file(data_path);
    const ModelFile file = load_model(model_path);
    const SampleSet samples = read_samples(data_path, parse_data_format(format), file.dimension, label_column);
    std::size_t correct = 0;
    for (std::size_t s = 0; s < samples.features.size(); ++s) {
        const DcsvmPrediction p = file.predict(samples.features[s]);
        if (trace) {
            for (const ClassPair &pair : p.path) {
                out << pair_name(file.model.table, pair) << " → ";
            }
        }
        out << p.label << '\n';
        if (samples.labels && (*samples.labels)[s] == p.label) {
            ++correct;
        }
    }
    if (samples.labels && !samples.features.empty()) {
        out << fmt::format("accuracy: {:.4f} ({}/{})\n", static_cast<double>(correct) / static_cast<double>(samples.features.size()),
                           correct, samples.features.size());
    }
    return exit_success;
}

int cmd_inspect(const std::string &model_path, const std::optional<std::string> &theta_text, const std::string &format, std::ostream &out) {
    TrainingFlags::require_file(model_path);
    const ModelFile file = load_model(model_path);
    const DcsvmModel &model = file.model;
    const Threshold theta = theta_text ? Threshold::parse(*theta_text) : model.theta;
    if (format == "csv") {
        write_table_csv(out, model.table);
        out << "\nrow_i,row_j,purity,balance,score\n";
        for (const ClassPair &pair : model.table.rows()) {
            out << model.labels[pair.i] << ',' << model.labels[pair.j] << ',' << purity_index(model.table, pair, theta) << ','
                << balance_index(model.table, pair, theta) << ',' << detail::format_double(score(model.table, pair)) << '\n';
        }
        out << "\ntheta,separated_cells,separation\n"
            << detail::format_double(theta.value()) << ',' << separated_cell_count(model.table, theta) << ','
            << detail::format_double(separation_percentage(model.table, theta)) << '\n';
        return exit_success;
    }
    if (format != "text") {
        throw ValidationError{ fmt::format("unknown inspect format '{}' (expected text or csv)", format) };
    }
    out << "All-Predictions table (C(l,i)/C(l,j) in percent):\n";
    write_table_text(out, model.table);
    out << fmt::format("\nMeasures at theta = {}:\n", detail::format_double(theta.value()));
    print_measures(out, model.table, theta);
    out << fmt::format("\nTree (built at theta = {}, {} strategy, depth {}):\n", detail::format_double(model.theta.value()),
                       to_string(model.strategy), model.tree.depth());
    model.tree.render(out, model.labels);
    out << fmt::format("\nSeparation at theta = {}: {} of {} cells ({})\n", detail::format_double(theta.value()),
                       separated_cell_count(model.table, theta), model.table.rows().size() * model.table.class_count(),
                       percent(separation_percentage(model.table, theta)));
    return exit_success;
}

struct BenchFlags {
    std::string methods{ "dcsvm,ovo,dag" };
    std::vector<std::string> thetas{ "0" };
    std::size_t trials{ 10 };
    double train_fraction{ 0.8 };
    std::uint64_t seed{ 1 };
    bool no_timing{ false };
    std::string report{ "text" };

    void attach(CLI::App &cmd, bool sweep) {
        if (sweep) {
            cmd.add_option("--thetas", thetas, "Thresholds, comma separated (fractions or percents, e.g. 0,0.1%,1%)")->required();
        } else {
            cmd.add_option("--methods", methods, "Comma separated subset of dcsvm,ovo,dag,ovr")->capture_default_str();
            cmd.add_option("--theta", thetas, "DCSVM threshold(s), e.g. 0.02 or 2%")->capture_default_str();
        }
        cmd.add_option("--trials", trials, "Number of random train/test resamplings")->capture_default_str();
        cmd.add_option("--train-fraction", train_fraction, "Training share of every split")->capture_default_str();
        cmd.add_option("--seed", seed, "Base seed; trial t uses seed + t")->capture_default_str();
        cmd.add_flag("--no-timing", no_timing, "Report zero timings (reproducible output)");
        cmd.add_option("--report", report, "Report format: text or csv")->capture_default_str();
    }
};

int cmd_bench(const TrainingFlags &flags, const BenchFlags &bench, bool sweep, std::ostream &out) {
    TrialConfig cfg;
    cfg.dataset_name = std::filesystem::path{ flags.data }.stem().string();
    cfg.methods = sweep ? std::vector<Method>{ Method::dcsvm } : parse_method_list(bench.methods);
    cfg.thetas = parse_thresholds(bench.thetas);
    cfg.trials = bench.trials;
    cfg.split = SplitSpec{ bench.train_fraction, bench.seed, true };
    cfg.kernel = flags.kernel_spec();
    cfg.auto_gamma = !flags.gamma.has_value();
    cfg.hp = flags.hyper_params();
    cfg.strategy = parse_selection_strategy(flags.strategy);
    cfg.scale = flags.scale;
    cfg.threads = flags.threads;
    cfg.record_timing = !bench.no_timing;
    if (bench.report != "text" && bench.report != "csv") {
        throw ValidationError{ fmt::format("unknown report format '{}' (expected text or csv)", bench.report) };
    }
    cfg.validate();
    const LabeledDataset ds = flags.load();
    const EvalReport report = sweep ? threshold_sweep(ds, cfg, cfg.thetas) : run_trials(ds, cfg);
    if (bench.report == "csv") {
        write_report_csv(out, report);
    } else {
        write_report_text(out, report);
    }
    return exit_success;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{ "Divide-and-conquer multi-class SVM (DCSVM) with one-vs-one, DAGSVM and one-vs-rest baselines", "dcsvm" };
    app.require_subcommand(1);

    TrainingFlags train_flags;
    std::string theta_text{ "0" };
    std::string out_path;
    CLI::App *train = app.add_subcommand("train", "Train pair classifiers, build the DCSVM tree and write a model file");
    train_flags.attach(*train);
    train->add_option("--theta", theta_text, "Accuracy threshold, e.g. 0.01 or 1%")->capture_default_str();
    train->add_option("--out", out_path, "Model file to write")->required();

    std::string model_path;
    std::string predict_data;
    std::string predict_format{ "libsvm" };
    std::optional<std::size_t> predict_label_column;
    bool trace = false;
    CLI::App *predict = app.add_subcommand("predict", "Classify samples with a saved model, one label per line");
    predict->add_option("--model", model_path, "Model file")->required();
    predict->add_option("--data", predict_data, "Samples to classify (labels optional)")->required();
    predict->add_option("--format", predict_format, "Data format: libsvm or csv")->capture_default_str();
    predict->add_option("--label-column", predict_label_column, "CSV label column (0-based, default last)");
    predict->add_flag("--trace", trace, "Print the decision path of every sample");

    std::optional<std::string> inspect_theta;
    std::string inspect_format{ "text" };
    CLI::App *inspect = app.add_subcommand("inspect", "Print the All-Predictions table, row measures, tree and separation");
    inspect->add_option("--model", model_path, "Model file")->required();
    inspect->add_option("--theta", inspect_theta, "Threshold for the measures (default: the model's)");
    inspect->add_option("--format", inspect_format, "Output format: text or csv")->capture_default_str();

    TrainingFlags compare_flags;
    BenchFlags compare_bench;
    CLI::App *compare = app.add_subcommand("compare", "Compare methods over repeated random train/test splits");
    compare_flags.attach(*compare);
    compare_bench.attach(*compare, false);

    TrainingFlags sweep_flags;
    BenchFlags sweep_bench;
    CLI::App *sweep = app.add_subcommand("sweep", "DCSVM accuracy, steps and separation across thresholds");
    sweep_flags.attach(*sweep);
    sweep_bench.attach(*sweep, true);

    std::vector<std::string> argv_storage{ "dcsvm" };
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char *> argv;
    for (const std::string &a : argv_storage) {
        argv.push_back(a.c_str());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_success : exit_usage;
    }

    try {
        if (train->parsed()) {
            return cmd_train(train_flags, theta_text, out_path, out);
        }
        if (predict->parsed()) {
            return cmd_predict(model_path, predict_data, predict_format, predict_label_column, trace, out);
        }
        if (inspect->parsed()) {
            return cmd_inspect(model_path, inspect_theta, inspect_format, out);
        }
        if (compare->parsed()) {
            return cmd_bench(compare_flags, compare_bench, false, out);
        }
        if (sweep->parsed()) {
            return cmd_bench(sweep_flags, sweep_bench, true, out);
        }
    } catch (const ValidationError &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const FileError &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ParseError &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const DimensionError &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_usage;
}

}  // namespace dcsvm
