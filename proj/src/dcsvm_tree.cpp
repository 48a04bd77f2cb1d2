#include "dcsvm/dcsvm_tree.hpp"

#include "dcsvm/error.hpp"

#include "fmt/core.h"

#include <algorithm>
#include <ostream>
#include <tuple>

namespace dcsvm {

std::string_view to_string(SelectionStrategy strategy) noexcept {
    return strategy == SelectionStrategy::balanced ? "balanced" : "accuracy";
}

SelectionStrategy parse_selection_strategy(std::string_view name) {
    if (name == "balanced") {
        return SelectionStrategy::balanced;
    }
    if (name == "accuracy") {
        return SelectionStrategy::accuracy;
    }
    throw ValidationError{ fmt::format("unknown selection strategy '{}' (expected balanced or accuracy)", name) };
}

ClassSplit split_classes(const AllPredictionsTable &table, ClassPair pair, Threshold theta) {
    const auto row = table.find_row(pair);
    if (!row) {
        throw ValidationError{ fmt::format("svm_{{{},{}}} is not a row of the table", pair.i, pair.j) };
    }
    ClassSplit split;
    for (std::size_t c = 0; c < table.class_count(); ++c) {
        const std::size_t l = table.columns()[c];
        if (l == pair.i) {
            split.left.push_back(l);
            continue;
        }
        if (l == pair.j) {
            split.right.push_back(l);
            continue;
        }
        const LikelihoodPair &cell = table.cell_at(*row, c);
        bool left = chi(theta, cell.toward_i) == 1;
        bool right = chi(theta, cell.toward_j) == 1;
        if (!left && !right) {
            left = right = true;
        }
        if (left) {
            split.left.push_back(l);
        }
        if (right) {
            split.right.push_back(l);
        }
    }
    return split;
}

ClassPair select_optimal(const AllPredictionsTable &table, Threshold theta, SelectionStrategy strategy) {
    if (table.empty()) {
        throw ValidationError{ "cannot select a classifier from an empty table" };
    }
    // larger key wins; strict comparison keeps the earliest row on ties
    const auto key = [&](ClassPair pair) {
        const int purity = purity_index(table, pair, theta);
        const int balance = balance_index(table, pair, theta);
        const double s = score(table, pair);
        return strategy == SelectionStrategy::balanced ? std::make_tuple(static_cast<double>(-purity), static_cast<double>(balance), s)
                                                       : std::make_tuple(s, static_cast<double>(-purity), static_cast<double>(balance));
    };
    ClassPair best = table.rows().front();
    auto best_key = key(best);
    for (std::size_t r = 1; r < table.rows().size(); ++r) {
        const ClassPair pair = table.rows()[r];
        const auto k = key(pair);
        if (k > best_key) {
            best = pair;
            best_key = k;
        }
    }
    return best;
}

DcsvmTree::DcsvmTree(std::vector<TreeNode> nodes) :
    nodes_{ std::move(nodes) } {
    if (nodes_.empty()) {
        return;
    }
    std::vector<int> parents(nodes_.size(), 0);
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        const TreeNode &node = nodes_[n];
        if (node.is_leaf()) {
            continue;
        }
        for (const std::size_t child : { node.left, node.right }) {
            if (child <= n || child >= nodes_.size()) {
                throw ValidationError{ fmt::format("tree node {} has invalid child {}", n, child) };
            }
            ++parents[child];
        }
    }
    if (parents[0] != 0 || std::any_of(parents.begin() + 1, parents.end(), [](int p) { return p != 1; })) {
        throw ValidationError{ "tree nodes do not form a single rooted tree" };
    }
}

std::size_t DcsvmTree::depth() const {
    if (nodes_.empty()) {
        return 0;
    }
    // children follow parents, so a reverse sweep sees children first
    std::vector<std::size_t> below(nodes_.size(), 0);
    for (std::size_t n = nodes_.size(); n-- > 0;) {
        const TreeNode &node = nodes_[n];
        if (!node.is_leaf()) {
            below[n] = 1 + std::max(below[node.left], below[node.right]);
        }
    }
    return below[0];
}

std::size_t DcsvmTree::internal_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode &n) { return !n.is_leaf(); }));
}

std::vector<std::size_t> DcsvmTree::leaf_classes() const {
    std::vector<std::size_t> classes;
    for (const TreeNode &node : nodes_) {
        if (node.is_leaf()) {
            classes.push_back(node.class_index);
        }
    }
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return classes;
}

void DcsvmTree::render(std::ostream &out, std::span<const int> labels) const {
    if (nodes_.empty()) {
        return;
    }
    const auto visit = [&](const auto &self, std::size_t index, std::size_t indent) -> void {
        const TreeNode &node = nodes_[index];
        out << std::string(2 * indent, ' ');
        if (node.is_leaf()) {
            out << '[' << labels[node.class_index] << "]\n";
            return;
        }
        out << fmt::format("svm_{{{},{}}}\n", labels[node.pair->i], labels[node.pair->j]);
        self(self, node.left, indent + 1);
        self(self, node.right, indent + 1);
    };
    visit(visit, 0, 0);
}

namespace {

class TreeBuilder {
  public:
    TreeBuilder(Threshold theta, SelectionStrategy strategy) :
        theta_{ theta },
        strategy_{ strategy } {}

    std::size_t build(const AllPredictionsTable &table) {
        const std::size_t index = nodes_.size();
        const ClassPair pair = select_optimal(table, theta_, strategy_);
        const ClassSplit split = split_classes(table, pair, theta_);
        nodes_.push_back(TreeNode{ pair, 0, 0, 0 });
        const std::size_t left = branch(table, split.left);
        const std::size_t right = branch(table, split.right);
        nodes_[index].left = left;
        nodes_[index].right = right;
        return index;
    }

    std::vector<TreeNode> take() { return std::move(nodes_); }

  private:
    std::size_t branch(const AllPredictionsTable &table, const std::vector<std::size_t> &classes) {
        if (classes.size() == 1) {
            nodes_.push_back(TreeNode{ std::nullopt, classes.front(), 0, 0 });
            return nodes_.size() - 1;
        }
        return build(table.restrict_to(classes));
    }

    Threshold theta_;
    SelectionStrategy strategy_;
    std::vector<TreeNode> nodes_;
};

}  // namespace

DcsvmTree build_tree(const AllPredictionsTable &table, Threshold theta, SelectionStrategy strategy) {
    if (table.class_count() < 2) {
        throw CardinalityError{ "a decision tree needs at least 2 classes" };
    }
    TreeBuilder builder{ theta, strategy };
    builder.build(table);
    return DcsvmTree{ builder.take() };
}

std::size_t DcsvmModel::dimension() const {
    return classifiers.empty() ? 0 : classifiers.front().dimension;
}

const BinarySvmModel &DcsvmModel::classifier(ClassPair pair) const {
    return find_pair_classifier(classifiers, pair);
}

DcsvmModel make_dcsvm_model(std::vector<BinarySvmModel> classifiers, AllPredictionsTable table, Threshold theta, SelectionStrategy strategy) {
    std::sort(classifiers.begin(), classifiers.end(), [](const BinarySvmModel &a, const BinarySvmModel &b) { return a.pair < b.pair; });
    DcsvmModel model;
    model.labels = table.labels();
    model.tree = build_tree(table, theta, strategy);
    model.classifiers = std::move(classifiers);
    model.table = std::move(table);
    model.theta = theta;
    model.strategy = strategy;
    for (const TreeNode &node : model.tree.nodes()) {
        if (!node.is_leaf()) {
            static_cast<void>(model.classifier(*node.pair));
        }
    }
    return model;
}

DcsvmPrediction classify(const DcsvmModel &model, std::span<const double> x) {
    if (model.tree.empty()) {
        throw ValidationError{ "classify called on an untrained model" };
    }
    DcsvmPrediction prediction;
    const TreeNode *node = &model.tree.root();
    while (!node->is_leaf()) {
        const BinarySvmModel &decider = model.classifier(*node->pair);
        const bool toward_i = decider.predicts_i(x);
        ++prediction.steps;
        prediction.support_vectors += decider.support_vector_count();
        prediction.path.push_back(*node->pair);
        node = &model.tree.node(toward_i ? node->left : node->right);
    }
    prediction.class_index = node->class_index;
    prediction.label = model.labels.at(node->class_index);
    return prediction;
}

}  // namespace dcsvm
