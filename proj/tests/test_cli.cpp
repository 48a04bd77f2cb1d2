#include "doctest.h"

#include "fixtures.hpp"

#include "dcsvm/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dcsvm;

namespace {

struct Run {
    int status;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int status = run_cli(args, out, err);
    return { status, out.str(), err.str() };
}

std::string temp_path(const std::string &name) {
    return (std::filesystem::temp_directory_path() / ("dcsvm_cli_" + name)).string();
}

std::vector<std::string> lines(const std::string &text) {
    std::vector<std::string> out;
    std::istringstream in{ text };
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

bool contains(const std::string &text, const std::string &part) {
    return text.find(part) != std::string::npos;
}

const std::string iris = fixtures::data_path("iris.libsvm");
const std::string wine = fixtures::data_path("wine.libsvm");

std::string train_iris_model() {
    const std::string model = temp_path("iris.model");
    const Run r = run({ "train", "--data", iris, "--scale", "-C", "10", "--gamma", "1", "--theta", "0.0001", "--out", model });
    REQUIRE(r.status == 0);
    return model;
}

}  // namespace

TEST_CASE("train reports the table and tree") {
    const std::string model = temp_path("train.model");
    const Run r = run({ "train", "--data", iris, "--scale", "-C", "10", "--gamma", "1", "--theta", "1e-4", "--out", model });
    CHECK(r.status == 0);
    CHECK(contains(r.out, "150 samples, 4 features, 3 classes"));
    CHECK(contains(r.out, "tree depth: 2"));
    CHECK(contains(r.out, "svm_{1,2}"));
    CHECK(std::filesystem::exists(model));
    std::filesystem::remove(model);
}

TEST_CASE("usage and validation errors exit with status 2") {
    const std::string missing = temp_path("does_not_exist.libsvm");
    Run r = run({ "train", "--data", missing, "--out", temp_path("x.model") });
    CHECK(r.status == 2);
    CHECK(contains(r.err, missing));

    r = run({ "train", "--data", iris, "--theta", "1.5", "--out", temp_path("x.model") });
    CHECK(r.status == 2);

    r = run({ "compare", "--data", iris, "--methods", "dcsvm,svm" });
    CHECK(r.status == 2);
    CHECK(contains(r.err, "ovr"));

    CHECK(run({ "frobnicate" }).status == 2);
    CHECK(run({}).status == 2);
    CHECK(run({ "train" }).status == 2);
    CHECK(run({ "train", "--data", iris, "--kernel", "sigmoid", "--out", temp_path("x.model") }).status == 2);
    CHECK(run({ "predict", "--model", temp_path("missing.model"), "--data", iris }).status == 2);
}

TEST_CASE("help exits with status 0") {
    const Run r = run({ "--help" });
    CHECK(r.status == 0);
    CHECK(contains(r.out, "train"));
    CHECK(run({ "sweep", "--help" }).status == 0);
}

TEST_CASE("a corrupted model is a runtime failure") {
    const std::string model = train_iris_model();
    {
        std::ofstream f{ model, std::ios::app };
        f << "junk";
    }
    const Run r = run({ "predict", "--model", model, "--data", iris });
    CHECK(r.status == 1);
    CHECK(contains(r.err, "checksum"));
    std::filesystem::remove(model);
}

TEST_CASE("predict") {
    const std::string model = train_iris_model();

    SUBCASE("labelled input reports accuracy") {
        const Run r = run({ "predict", "--model", model, "--data", iris });
        CHECK(r.status == 0);
        const auto out = lines(r.out);
        REQUIRE(out.size() == 151);
        CHECK(out[0] == "1");
        CHECK(out.back().rfind("accuracy: ", 0) == 0);
    }
    SUBCASE("unlabelled input prints only labels") {
        const std::string data = temp_path("unlabelled.txt");
        {
            std::ofstream f{ data };
            f << "1:5.1 2:3.5 3:1.4 4:0.2\n1:6.7 2:3.0 3:5.2 4:2.3\n";
        }
        const Run r = run({ "predict", "--model", model, "--data", data });
        CHECK(r.status == 0);
        CHECK(lines(r.out) == std::vector<std::string>{ "1", "3" });
        std::filesystem::remove(data);
    }
    SUBCASE("trace shows the decision path") {
        const std::string data = temp_path("trace.txt");
        {
            std::ofstream f{ data };
            f << "1:6.7 2:3.0 3:5.2 4:2.3\n";
        }
        const Run r = run({ "predict", "--model", model, "--data", data, "--trace" });
        CHECK(r.status == 0);
        CHECK(lines(r.out) == std::vector<std::string>{ "svm_{1,2} → svm_{2,3} → 3" });
        std::filesystem::remove(data);
    }
    SUBCASE("dimension mismatch") {
        const Run r = run({ "predict", "--model", model, "--data", wine });
        CHECK(r.status == 2);
    }
    std::filesystem::remove(model);
}

TEST_CASE("inspect") {
    const std::string model = train_iris_model();

    const Run text = run({ "inspect", "--model", model });
    CHECK(text.status == 0);
    CHECK(contains(text.out, "90.0/10.0"));
    CHECK(contains(text.out, "Separation at theta = 1e-04: 8 of 9 cells"));

    const Run loose = run({ "inspect", "--model", model, "--theta", "0.3" });
    CHECK(contains(loose.out, "9 of 9 cells"));

    const Run csv = run({ "inspect", "--model", model, "--format", "csv" });
    CHECK(csv.status == 0);
    const auto rows = lines(csv.out);
    REQUIRE(rows.size() >= 16);
    CHECK(rows[0] == "row_i,row_j,class,toward_i,toward_j");
    CHECK(rows[11] == "row_i,row_j,purity,balance,score");
    CHECK(rows[14] == "2,3,1,1,0.95");

    // the threshold moves purity and balance but never the score
    const auto loose_rows = lines(run({ "inspect", "--model", model, "--format", "csv", "--theta", "0.3" }).out);
    CHECK(loose_rows[14] == "2,3,0,1,0.95");
    std::filesystem::remove(model);
}

TEST_CASE("compare and sweep reports") {
    const std::vector<std::string> common{ "--data", iris, "--scale", "-C", "10", "--gamma", "1", "--trials", "2", "--no-timing", "--report", "csv" };

    std::vector<std::string> compare{ "compare", "--methods", "dcsvm,ovo,dag,ovr", "--theta", "0,0.02" };
    compare.insert(compare.end(), common.begin(), common.end());
    const Run a = run(compare);
    CHECK(a.status == 0);
    CHECK(lines(a.out).size() == 6);
    CHECK(run(compare).out == a.out);

    std::vector<std::string> sweep{ "sweep", "--thetas", "0,0.001,0.01,0.02,0.05" };
    sweep.insert(sweep.end(), common.begin(), common.end());
    const Run s = run(sweep);
    CHECK(s.status == 0);
    CHECK(lines(s.out).size() == 6);

    std::vector<std::string> single{ "sweep", "--thetas", "0.02" };
    single.insert(single.end(), common.begin(), common.end());
    CHECK(run(single).status == 2);
}
