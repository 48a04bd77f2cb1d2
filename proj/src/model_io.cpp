#include "dcsvm/model_io.hpp"

#include "dcsvm/error.hpp"
#include "text_util.hpp"

#include "fmt/core.h"
#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace dcsvm {

using nlohmann::json;

namespace {

constexpr std::string_view magic = "DCSVM-MODEL";

json kernel_to_json(const KernelSpec &k) {
    return { { "kind", std::string{ to_string(k.kind) } }, { "gamma", k.gamma }, { "degree", k.degree }, { "coef0", k.coef0 } };
}

KernelSpec kernel_from_json(const json &j) {
    KernelSpec k;
    k.kind = parse_kernel_kind(j.at("kind").get<std::string>());
    k.gamma = j.at("gamma").get<double>();
    k.degree = j.at("degree").get<int>();
    k.coef0 = j.at("coef0").get<double>();
    k.validate();
    return k;
}

json pair_to_json(ClassPair p) {
    return json::array({ p.i, p.j });
}

ClassPair pair_from_json(const json &j) {
    return { j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>() };
}

json classifier_to_json(const BinarySvmModel &m) {
    return {
        { "pair", pair_to_json(m.pair) },
        { "bias", m.bias },
        { "converged", m.converged },
        { "iterations", m.iterations },
        { "coefficients", m.coefficients },
        { "support_vectors", m.support_vectors },
    };
}

BinarySvmModel classifier_from_json(const json &j, const KernelSpec &kernel, std::size_t dimension) {
    BinarySvmModel m;
    m.pair = pair_from_json(j.at("pair"));
    m.kernel = kernel;
    m.dimension = dimension;
    m.bias = j.at("bias").get<double>();
    m.converged = j.at("converged").get<bool>();
    m.iterations = j.at("iterations").get<std::size_t>();
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    m.support_vectors = j.at("support_vectors").get<std::vector<FeatureVector>>();
    if (m.coefficients.size() != m.support_vectors.size()) {
        throw ModelFormatError{ "classifier coefficient and support vector counts differ" };
    }
    for (const FeatureVector &sv : m.support_vectors) {
        if (sv.size() != dimension) {
            throw ModelFormatError{ "support vector dimension does not match the model" };
        }
    }
    return m;
}

json table_to_json(const AllPredictionsTable &t) {
    json rows = json::array();
    for (const ClassPair &p : t.rows()) {
        rows.push_back(pair_to_json(p));
    }
    // toward_j is always 1 - toward_i, so only toward_i is stored
    json cells = json::array();
    for (std::size_t r = 0; r < t.rows().size(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < t.class_count(); ++c) {
            row.push_back(t.cell_at(r, c).toward_i);
        }
        cells.push_back(std::move(row));
    }
    return { { "rows", rows }, { "columns", t.columns() }, { "toward_i", cells } };
}

AllPredictionsTable table_from_json(const json &j, std::vector<int> labels) {
    std::vector<ClassPair> rows;
    for (const json &p : j.at("rows")) {
        rows.push_back(pair_from_json(p));
    }
    std::vector<std::vector<LikelihoodPair>> cells;
    for (const json &row : j.at("toward_i")) {
        std::vector<LikelihoodPair> cell_row;
        for (const json &v : row) {
            cell_row.push_back(LikelihoodPair::from_fraction(v.get<double>()));
        }
        cells.push_back(std::move(cell_row));
    }
    return AllPredictionsTable{ std::move(rows), j.at("columns").get<std::vector<std::size_t>>(), std::move(cells), std::move(labels) };
}

json tree_to_json(const DcsvmTree &tree) {
    json nodes = json::array();
    for (const TreeNode &n : tree.nodes()) {
        if (n.is_leaf()) {
            nodes.push_back({ { "leaf", n.class_index } });
        } else {
            nodes.push_back({ { "pair", pair_to_json(*n.pair) }, { "left", n.left }, { "right", n.right } });
        }
    }
    return nodes;
}

DcsvmTree tree_from_json(const json &j) {
    std::vector<TreeNode> nodes;
    for (const json &n : j) {
        TreeNode node;
        if (n.contains("leaf")) {
            node.class_index = n.at("leaf").get<std::size_t>();
        } else {
            node.pair = pair_from_json(n.at("pair"));
            node.left = n.at("left").get<std::size_t>();
            node.right = n.at("right").get<std::size_t>();
        }
        nodes.push_back(node);
    }
    return DcsvmTree{ std::move(nodes) };
}

json body_to_json(const ModelFile &f) {
    json classifiers = json::array();
    for (const BinarySvmModel &m : f.model.classifiers) {
        classifiers.push_back(classifier_to_json(m));
    }
    json body = {
        { "dimension", f.dimension },
        { "labels", f.model.labels },
        { "kernel", kernel_to_json(f.kernel) },
        { "hyper_params", { { "C", f.hp.C }, { "tol", f.hp.tol }, { "max_iterations", f.hp.max_iterations } } },
        { "theta", f.model.theta.value() },
        { "strategy", std::string{ to_string(f.model.strategy) } },
        { "classifiers", classifiers },
        { "table", table_to_json(f.model.table) },
        { "tree", tree_to_json(f.model.tree) },
    };
    body["scaler"] = f.scaler ? json{ { "min", f.scaler->min() }, { "max", f.scaler->max() } } : json(nullptr);
    return body;
}

ModelFile body_from_json(const json &body) {
    ModelFile f;
    f.dimension = body.at("dimension").get<std::size_t>();
    f.kernel = kernel_from_json(body.at("kernel"));
    const json &hp = body.at("hyper_params");
    f.hp.C = hp.at("C").get<double>();
    f.hp.tol = hp.at("tol").get<double>();
    f.hp.max_iterations = hp.at("max_iterations").get<std::size_t>();
    if (!body.at("scaler").is_null()) {
        f.scaler = MinMaxScaler{ body["scaler"].at("min").get<std::vector<double>>(), body["scaler"].at("max").get<std::vector<double>>() };
        if (f.scaler->min().size() != f.dimension) {
            throw ModelFormatError{ "scaler dimension does not match the model" };
        }
    }

    DcsvmModel &m = f.model;
    m.labels = body.at("labels").get<std::vector<int>>();
    m.theta = Threshold{ body.at("theta").get<double>() };
    m.strategy = parse_selection_strategy(body.at("strategy").get<std::string>());
    for (const json &c : body.at("classifiers")) {
        m.classifiers.push_back(classifier_from_json(c, f.kernel, f.dimension));
    }
    m.table = table_from_json(body.at("table"), m.labels);
    m.tree = tree_from_json(body.at("tree"));

    const std::size_t k = m.labels.size();
    if (k < 2 || m.classifiers.size() != k * (k - 1) / 2 || m.tree.empty()) {
        throw ModelFormatError{ "model does not hold one classifier per class pair" };
    }
    for (std::size_t c = 0; c < m.classifiers.size(); ++c) {
        if (c > 0 && !(m.classifiers[c - 1].pair < m.classifiers[c].pair)) {
            throw ModelFormatError{ "classifiers are not in pair order" };
        }
        if (m.classifiers[c].pair.j >= k) {
            throw ModelFormatError{ "classifier refers to an unknown class" };
        }
    }
    const auto known_pair = [&](ClassPair p) {
        return std::any_of(m.classifiers.begin(), m.classifiers.end(), [&](const BinarySvmModel &c) { return c.pair == p; });
    };
    for (const TreeNode &node : m.tree.nodes()) {
        if (node.is_leaf() ? node.class_index >= k : !known_pair(*node.pair)) {
            throw ModelFormatError{ "tree refers to an unknown class or classifier" };
        }
    }
    return f;
}

}  // namespace

FeatureVector ModelFile::prepare(std::span<const double> x) const {
    if (x.size() != dimension) {
        throw DimensionError{ fmt::format("sample has dimension {}, model expects {}", x.size(), dimension) };
    }
    return scaler ? scaler->transform(x) : FeatureVector(x.begin(), x.end());
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string serialize_model(const ModelFile &file) {
    const std::string body = body_to_json(file).dump() + "\n";
    return fmt::format("{} v{}\nchecksum fnv1a64:{:016x}\n{}", magic, ModelFile::format_version, fnv1a64(body), body);
}

ModelFile deserialize_model(std::string_view text) {
    const auto first_nl = text.find('\n');
    if (first_nl == std::string_view::npos) {
        throw ChecksumError{ "model file is truncated (no header)" };
    }
    const std::string_view header = text.substr(0, first_nl);
    const std::string prefix = fmt::format("{} v", magic);
    if (header.substr(0, prefix.size()) != prefix) {
        throw ModelFormatError{ "not a DCSVM model file" };
    }
    const auto version = detail::to_integer<int>(header.substr(prefix.size()));
    if (!version) {
        throw ModelFormatError{ fmt::format("unreadable model version '{}'", header.substr(prefix.size())) };
    }
    if (*version != ModelFile::format_version) {
        throw VersionError{ fmt::format("model format version {} is not supported (this build reads version {})", *version,
                                        ModelFile::format_version) };
    }
    const auto second_nl = text.find('\n', first_nl + 1);
    if (second_nl == std::string_view::npos) {
        throw ChecksumError{ "model file is truncated (no checksum line)" };
    }
    const std::string_view checksum_line = text.substr(first_nl + 1, second_nl - first_nl - 1);
    constexpr std::string_view checksum_prefix = "checksum fnv1a64:";
    if (checksum_line.substr(0, checksum_prefix.size()) != checksum_prefix) {
        throw ModelFormatError{ "missing checksum line" };
    }
    const std::string_view hex = checksum_line.substr(checksum_prefix.size());
    std::uint64_t expected{};
    const auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), expected, 16);
    if (ec != std::errc{} || ptr != hex.data() + hex.size()) {
        throw ModelFormatError{ "malformed checksum" };
    }
    const std::string_view body = text.substr(second_nl + 1);
    if (fnv1a64(body) != expected) {
        throw ChecksumError{ "model checksum mismatch (file is corrupted or truncated)" };
    }
    try {
        return body_from_json(json::parse(body));
    } catch (const json::exception &e) {
        throw ModelFormatError{ fmt::format("invalid model body: {}", e.what()) };
    } catch (const ModelFormatError &) {
        throw;
    } catch (const Error &e) {
        throw ModelFormatError{ fmt::format("invalid model body: {}", e.what()) };
    }
}

void save_model(const std::filesystem::path &path, const ModelFile &file) {
    const std::string text = serialize_model(file);
    std::ofstream out{ path, std::ios::binary };
    if (!out) {
        throw FileError{ fmt::format("cannot write '{}'", path.string()) };
    }
    out << text;
    if (!out) {
        throw FileError{ fmt::format("failed writing '{}'", path.string()) };
    }
}

ModelFile load_model(const std::filesystem::path &path) {
    std::ifstream in{ path, std::ios::binary };
    if (!in) {
        throw FileError{ fmt::format("cannot open '{}'", path.string()) };
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return deserialize_model(buffer.str());
}

}  // namespace dcsvm
