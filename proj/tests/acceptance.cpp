#include "fixtures.hpp"
#include "qp_oracle.hpp"

#include "dcsvm/baselines.hpp"
#include "dcsvm/bench.hpp"
#include "dcsvm/model_io.hpp"
#include "dcsvm/random.hpp"

#include "fmt/core.h"

#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

using namespace dcsvm;

namespace {

struct Outcome {
    bool pass{ true };
    std::string detail;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

LabeledDataset load(const std::string &name) {
    return load_dataset(fixtures::data_path(name + ".libsvm"), DataFormat::libsvm);
}

const KernelSpec desk_kernel = KernelSpec::rbf(1.0);
const SvmHyperParams desk_hp{ 10.0, 1e-3, 1'000'000 };
const Threshold small_theta{ 1e-4 };

TrialConfig desk_config(const std::string &name, std::vector<Method> methods) {
    TrialConfig cfg;
    cfg.dataset_name = name;
    cfg.methods = std::move(methods);
    cfg.thetas = { small_theta };
    cfg.trials = 10;
    cfg.split = { 0.8, 1, true };
    cfg.kernel = desk_kernel;
    cfg.auto_gamma = false;
    cfg.hp = desk_hp;
    cfg.scale = true;
    cfg.record_timing = false;
    return cfg;
}

const EvalReport &desk_report(const std::string &name) {
    static std::map<std::string, EvalReport> cache;
    auto it = cache.find(name);
    if (it == cache.end()) {
        it = cache.emplace(name, run_trials(load(name), desk_config(name, { Method::dcsvm, Method::ovo, Method::dag }))).first;
    }
    return it->second;
}

struct Instance {
    std::vector<FeatureVector> x;
    std::vector<int> y;
    KernelSpec kernel;
    SvmHyperParams hp;
};

Instance random_instance(Rng &rng) {
    Instance inst;
    const std::size_t n = 2 + rng.below(11);
    const std::size_t d = 1 + rng.below(3);
    for (std::size_t s = 0; s < n; ++s) {
        FeatureVector x(d);
        for (double &v : x) {
            v = rng.uniform(-2.0, 2.0);
        }
        inst.x.push_back(std::move(x));
        inst.y.push_back(rng.below(2) == 0 ? 1 : -1);
    }
    inst.y[0] = 1;
    inst.y[1] = -1;
    switch (rng.below(3)) {
    case 0: inst.kernel = KernelSpec::linear(); break;
    case 1: inst.kernel = KernelSpec::rbf(rng.uniform(0.1, 2.0)); break;
    default: inst.kernel = KernelSpec::polynomial(rng.uniform(0.2, 1.0), 2 + static_cast<int>(rng.below(2)), rng.uniform(0.0, 1.0)); break;
    }
    inst.hp.C = rng.uniform(0.1, 10.0);
    inst.hp.tol = 1e-5;
    return inst;
}

Outcome solver_oracle() {
    Outcome o;
    const auto start = Clock::now();
    Rng rng{ 31337 };
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Instance inst = random_instance(rng);
        const DualSolution smo = solve_dual(inst.x, inst.y, inst.kernel, inst.hp);
        const auto q = oracle::q_matrix(inst.x, inst.y, inst.kernel);
        const double got = oracle::objective(q, smo.alpha);
        const double want = oracle::objective(q, oracle::solve(q, inst.y, inst.hp.C));
        const double rel = std::abs(got - want) / std::max(1.0, std::abs(want));
        worst = std::max(worst, rel);
        o.require(smo.converged, fmt::format("instance {} did not converge", trial));
        o.require(rel <= 1e-4, fmt::format("instance {} objective off by {:.2e}", trial, rel));
        const double kkt = oracle::kkt_gap(q, inst.y, smo.alpha, inst.hp.C);
        o.require(kkt <= inst.hp.tol, fmt::format("instance {} KKT residual {:.2e}", trial, kkt));
    }
    const double elapsed = seconds_since(start);
    o.require(elapsed < 30.0, fmt::format("took {:.1f} s", elapsed));
    if (o.pass) {
        o.detail = fmt::format("50 instances, worst relative gap {:.1e}, {:.2f} s", worst, elapsed);
    }
    return o;
}

Outcome metric_fixtures() {
    Outcome o;
    using fixtures::glass_pair;
    const AllPredictionsTable t = fixtures::glass_fixture_table();
    const Threshold five{ 0.05 };
    o.require(purity_index(t, glass_pair(1, 6), five) == 3, "P_{1,6}(0.05) != 3");
    std::vector<int> undecided;
    const std::size_t row = *t.find_row(glass_pair(1, 6));
    for (std::size_t c = 0; c < t.class_count(); ++c) {
        const LikelihoodPair &cell = t.cell_at(row, c);
        if (chi(five, cell.toward_i) == 1 && chi(five, cell.toward_j) == 1) {
            undecided.push_back(t.labels()[c]);
        }
    }
    o.require(undecided == std::vector<int>{ 2, 5, 7 }, "undecided set of svm_{1,6} is not {2,5,7}");
    o.require(balance_index(t, glass_pair(1, 2), five) == 1, "B_{1,2}(0.05) != 1");
    o.require(balance_index(t, glass_pair(5, 6), five) == 2, "B_{5,6}(0.05) != 2");
    o.require(score(t, glass_pair(1, 2)) == 1.0, "S_{1,2} != 100%");

    // hand-computed single rows on a four-class table
    const auto one_row = [](std::vector<double> toward_i) {
        std::vector<std::vector<LikelihoodPair>> cells(6, std::vector<LikelihoodPair>(4, LikelihoodPair::from_fraction(1.0)));
        for (std::size_t c = 0; c < 4; ++c) {
            cells[2][c] = LikelihoodPair::from_fraction(toward_i[c]);
        }
        return AllPredictionsTable{ fixtures::all_pairs(4), fixtures::iota(4), cells, fixtures::labels_1_to(4) };
    };
    const AllPredictionsTable split = one_row({ 1.0, 0.3, 0.5, 0.0 });
    o.require(purity_index(split, { 0, 3 }, five) == 2, "rigged purity != 2");
    o.require(balance_index(split, { 0, 3 }, five) == 1, "rigged balance != 1");
    o.require(score(split, { 0, 3 }) == 1.0, "rigged score != 1");
    const AllPredictionsTable noisy = one_row({ 0.9, 0.3, 0.5, 0.2 });
    o.require(purity_index(noisy, { 0, 3 }, five) == 4, "noisy purity != 4");
    o.require(balance_index(noisy, { 0, 3 }, five) == 0, "noisy balance != 0");
    o.require(std::abs(score(noisy, { 0, 3 }) - 0.85) < 1e-12, "noisy score != 0.85");
    return o;
}

Outcome worked_tree() {
    Outcome o;
    const DcsvmTree tree = build_tree(fixtures::glass_fixture_table(), Threshold{}, SelectionStrategy::balanced);
    std::ostringstream out;
    tree.render(out, fixtures::glass_labels);
    const std::string expected =
        "svm_{5,6}\n"
        "  svm_{1,2}\n"
        "    [1]\n"
        "    svm_{2,3}\n"
        "      svm_{2,5}\n"
        "        [2]\n"
        "        [5]\n"
        "      [3]\n"
        "  svm_{6,7}\n"
        "    [6]\n"
        "    [7]\n";
    o.require(out.str() == expected, "tree differs:\n" + out.str());
    return o;
}

Outcome depth_bounds() {
    Outcome o;
    const auto start = Clock::now();
    Rng rng{ 4242 };
    const std::vector<double> thetas{ 0.0, 0.01, 0.05, 0.1, 0.3 };
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 3 + rng.below(10);
        const AllPredictionsTable t = fixtures::random_table(k, rng);
        const Threshold theta{ thetas[rng.below(thetas.size())] };
        const SelectionStrategy strategy = rng.below(2) == 0 ? SelectionStrategy::balanced : SelectionStrategy::accuracy;
        const DcsvmTree tree = build_tree(t, theta, strategy);
        o.require(tree.depth() <= k - 1, fmt::format("random table {} (k={}) has depth {}", trial, k, tree.depth()));
        o.require(tree.leaf_classes() == fixtures::iota(k), fmt::format("random table {} loses a class", trial));
    }
    for (std::size_t k = 2; k <= 16; ++k) {
        const DcsvmTree tree = build_tree(fixtures::balanced_table(k), Threshold{}, SelectionStrategy::balanced);
        const auto bound = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(k))));
        o.require(tree.depth() <= bound, fmt::format("balanced k={} has depth {} > {}", k, tree.depth(), bound));
    }
    const double elapsed = seconds_since(start);
    o.require(elapsed < 10.0, fmt::format("took {:.1f} s", elapsed));
    if (o.pass) {
        o.detail = fmt::format("200 random tables and balanced k=2..16, {:.2f} s", elapsed);
    }
    return o;
}

Outcome desk_accuracy() {
    Outcome o;
    std::vector<std::string> parts;
    for (const std::string name : { "iris", "wine", "glass" }) {
        const auto start = Clock::now();
        const EvalReport &r = desk_report(name);
        const double elapsed = seconds_since(start);
        o.require(elapsed < 120.0, fmt::format("{} took {:.1f} s", name, elapsed));
        const double dcsvm = r.find(Method::dcsvm, small_theta)->accuracy;
        const double ovo = r.find(Method::ovo)->accuracy;
        parts.push_back(fmt::format("{} dcsvm {:.2f}% ovo {:.2f}%", name, 100.0 * dcsvm, 100.0 * ovo));
        if (name == "glass") {
            o.require(std::abs(dcsvm - ovo) <= 0.03, fmt::format("glass dcsvm {:.4f} vs ovo {:.4f}", dcsvm, ovo));
        } else {
            o.require(dcsvm >= 0.93, fmt::format("{} dcsvm accuracy {:.4f} < 0.93", name, dcsvm));
        }
    }
    if (o.pass) {
        o.detail = fmt::format("{}, {}, {}", parts[0], parts[1], parts[2]);
    }
    return o;
}

Outcome step_counts() {
    Outcome o;
    const double glass = desk_report("glass").find(Method::dcsvm, small_theta)->avg_steps;
    const double iris = desk_report("iris").find(Method::dcsvm, small_theta)->avg_steps;
    o.require(glass < 5.0, fmt::format("glass dcsvm mean steps {:.3f}", glass));
    o.require(iris <= 2.0, fmt::format("iris dcsvm mean steps {:.3f}", iris));
    for (const std::string name : { "iris", "wine", "glass" }) {
        const LabeledDataset ds = load(name);
        const std::size_t k = ds.class_count();
        const OvoModel ovo = make_ovo_model(ds.class_labels(), train_pair_classifiers(ds, desk_kernel, desk_hp));
        for (const auto &s : ds.samples()) {
            const std::size_t steps = dag_predict(ovo, s.features).steps;
            if (steps != k - 1) {
                o.require(false, fmt::format("dag took {} steps on {}", steps, name));
                break;
            }
        }
        o.require(desk_report(name).find(Method::dag)->avg_steps == static_cast<double>(k - 1), fmt::format("{} dag mean steps", name));
    }
    if (o.pass) {
        o.detail = fmt::format("glass {:.3f}, iris {:.3f}, dag exactly k-1", glass, iris);
    }
    return o;
}

Outcome threshold_monotonicity() {
    Outcome o;
    const std::vector<Threshold> thetas{ Threshold{ 0.0 }, Threshold{ 0.001 }, Threshold{ 0.01 }, Threshold{ 0.02 }, Threshold{ 0.05 } };
    for (const std::string name : { "glass", "iris" }) {
        const LabeledDataset raw = load(name);
        const LabeledDataset ds = MinMaxScaler::fit(raw).transform(raw);
        const auto pairs = train_pair_classifiers(ds, desk_kernel, desk_hp);
        const AllPredictionsTable t = build_all_predictions_table(pairs, ds.partition(), ds.class_labels());
        for (std::size_t n = 1; n < thetas.size(); ++n) {
            o.require(separation_percentage(t, thetas[n]) >= separation_percentage(t, thetas[n - 1]),
                      fmt::format("{} separation drops at theta {}", name, thetas[n].value()));
            for (const ClassPair &row : t.rows()) {
                o.require(purity_index(t, row, thetas[n]) <= purity_index(t, row, thetas[n - 1]),
                          fmt::format("{} purity of {} rises at theta {}", name, pair_name(t, row), thetas[n].value()));
            }
        }
    }
    return o;
}

Outcome two_class_collapse() {
    Outcome o;
    const LabeledDataset iris = load("iris");
    std::vector<LabeledSample> samples;
    for (const auto &s : iris.samples()) {
        if (s.label != 1) {
            samples.push_back(s);
        }
    }
    const auto [train, test] = stratified_split(LabeledDataset{ samples }, { 0.8, 3, true });
    auto pairs = train_pair_classifiers(train, desk_kernel, desk_hp);
    const BinarySvmModel binary = pairs.front();
    const OvoModel ovo = make_ovo_model(train.class_labels(), pairs);
    AllPredictionsTable table = build_all_predictions_table(pairs, train.partition(), train.class_labels());
    const DcsvmModel dcsvm = make_dcsvm_model(std::move(pairs), std::move(table), small_theta, SelectionStrategy::balanced);
    for (const auto &s : test.samples()) {
        const int expected = train.label_of(predict_binary(binary, s.features).label);
        const int a = classify(dcsvm, s.features).label;
        const int b = ovo_predict(ovo, s.features).label;
        const int c = dag_predict(ovo, s.features).label;
        o.require(a == expected && b == expected && c == expected, fmt::format("labels {} {} {} vs binary {}", a, b, c, expected));
    }
    if (o.pass) {
        o.detail = fmt::format("{} test vectors agree", test.size());
    }
    return o;
}

Outcome persistence() {
    Outcome o;
    std::size_t checked = 0;
    for (const std::string name : { "iris", "glass" }) {
        const auto [train_raw, test] = stratified_split(load(name), { 0.8, 1, true });
        ModelFile file;
        file.dimension = train_raw.dimension();
        file.scaler = MinMaxScaler::fit(train_raw);
        const LabeledDataset train = file.scaler->transform(train_raw);
        file.kernel = desk_kernel;
        file.hp = desk_hp;
        auto pairs = train_pair_classifiers(train, file.kernel, file.hp);
        AllPredictionsTable table = build_all_predictions_table(pairs, train.partition(), train.class_labels());
        file.model = make_dcsvm_model(std::move(pairs), std::move(table), small_theta, SelectionStrategy::balanced);

        const auto path = std::filesystem::temp_directory_path() / fmt::format("dcsvm_acceptance_{}.model", name);
        save_model(path, file);
        const ModelFile loaded = load_model(path);
        std::filesystem::remove(path);
        for (const auto &s : test.samples()) {
            const DcsvmPrediction a = file.predict(s.features);
            const DcsvmPrediction b = loaded.predict(s.features);
            o.require(a.label == b.label && a.path == b.path, fmt::format("{} prediction changed after reload", name));
            ++checked;
        }
    }
    if (o.pass) {
        o.detail = fmt::format("{} test vectors identical", checked);
    }
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        { "1 binary solver matches the QP oracle", solver_oracle },
        { "2 metric fixtures", metric_fixtures },
        { "3 worked-example tree", worked_tree },
        { "4 depth bounds", depth_bounds },
        { "5 desk-scale accuracy", desk_accuracy },
        { "6 step counts", step_counts },
        { "7 threshold monotonicity", threshold_monotonicity },
        { "8 two-class collapse", two_class_collapse },
        { "9 persistence round trip", persistence },
    };
    int failures = 0;
    for (const auto &[name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception &e) {
            o = { false, fmt::format("exception: {}", e.what()) };
        }
        failures += o.pass ? 0 : 1;
        fmt::print("{} criterion {}{}\n", o.pass ? "PASS" : "FAIL", name, o.detail.empty() ? "" : " (" + o.detail + ")");
    }
    return failures == 0 ? 0 : 1;
}
