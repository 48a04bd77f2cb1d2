#pragma once

#include "dcsvm/prediction_table.hpp"
#include "dcsvm/svm.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace dcsvm {

/**
 * Order in which the row metrics pick the optimal classifier.
 *
 *  - balanced: min purity, then max balance, then max score (favours shallow trees)
 *  - accuracy: max score, then min purity, then max balance (favours accurate deciders)
 *
 * Remaining ties go to the first row in lexicographic (i, j) order.
 */
enum class SelectionStrategy { balanced, accuracy };

[[nodiscard]] std::string_view to_string(SelectionStrategy strategy) noexcept;
[[nodiscard]] SelectionStrategy parse_selection_strategy(std::string_view name);

/// Classes sent to each side of a pair classifier (listi / listj). Ascending internal indices.
struct ClassSplit {
    std::vector<std::size_t> left;   // labeled i or undecided
    std::vector<std::size_t> right;  // labeled j or undecided
};

/**
 * Splits the active classes of `table` with row `pair`.
 *
 * Class l goes left when chi(C(l,i)) = 1 and right when chi(C(l,j)) = 1, so undecided classes go
 * both ways. Class i only ever goes left and class j only ever goes right, whatever their
 * measured self-likelihoods. A class with both likelihoods at or below theta (possible only when
 * theta >= 0.5) carries no decision and goes both ways.
 */
[[nodiscard]] ClassSplit split_classes(const AllPredictionsTable &table, ClassPair pair, Threshold theta);

/// Throws `ValidationError` for an empty table.
[[nodiscard]] ClassPair select_optimal(const AllPredictionsTable &table, Threshold theta, SelectionStrategy strategy);

struct TreeNode {
    std::optional<ClassPair> pair;  // set on internal nodes
    std::size_t class_index{ 0 };   // leaf class (internal index)
    std::size_t left{ 0 };          // child node indices, internal nodes only
    std::size_t right{ 0 };

    [[nodiscard]] bool is_leaf() const noexcept { return !pair.has_value(); }

    bool operator==(const TreeNode &) const = default;
};

/// Binary decision tree stored as a node array; node 0 is the root and children always follow
/// their parent.
class DcsvmTree {
  public:
    DcsvmTree() = default;
    /// Validates the node layout (child indices in range and after their parent, every node reachable once).
    explicit DcsvmTree(std::vector<TreeNode> nodes);

    [[nodiscard]] const std::vector<TreeNode> &nodes() const noexcept { return nodes_; }
    [[nodiscard]] const TreeNode &root() const { return nodes_.front(); }
    [[nodiscard]] const TreeNode &node(std::size_t index) const { return nodes_.at(index); }
    [[nodiscard]] bool empty() const noexcept { return nodes_.empty(); }

    /// Largest number of internal nodes on a root-to-leaf path.
    [[nodiscard]] std::size_t depth() const;
    [[nodiscard]] std::size_t internal_count() const;
    /// Distinct leaf classes, ascending.
    [[nodiscard]] std::vector<std::size_t> leaf_classes() const;

    /// Indented rendering, one node per line: "svm_{i,j}" for internal nodes, "[label]" for leaves.
    void render(std::ostream &out, std::span<const int> labels) const;

    bool operator==(const DcsvmTree &) const = default;

  private:
    std::vector<TreeNode> nodes_;
};

/// Recursively builds the decision tree over the classes of `table`, which must cover at least two.
[[nodiscard]] DcsvmTree build_tree(const AllPredictionsTable &table, Threshold theta, SelectionStrategy strategy);

/// A trained DCSVM classifier.
struct DcsvmModel {
    std::vector<int> labels;                   // external labels by internal index
    std::vector<BinarySvmModel> classifiers;   // one per pair, lexicographic pair order
    AllPredictionsTable table;
    DcsvmTree tree;
    Threshold theta;
    SelectionStrategy strategy{ SelectionStrategy::balanced };

    [[nodiscard]] std::size_t class_count() const noexcept { return labels.size(); }
    [[nodiscard]] std::size_t dimension() const;
    /// Throws `ValidationError` when the pair has no classifier.
    [[nodiscard]] const BinarySvmModel &classifier(ClassPair pair) const;
};

/// Builds the tree for `table` and bundles it with the pair classifiers (sorted into pair order).
[[nodiscard]] DcsvmModel make_dcsvm_model(std::vector<BinarySvmModel> classifiers, AllPredictionsTable table, Threshold theta,
                                          SelectionStrategy strategy);

struct DcsvmPrediction {
    int label{};                  // external class id
    std::size_t class_index{};
    std::size_t steps{ 0 };       // binary decisions taken
    std::size_t support_vectors{ 0 };  // summed over the visited deciders
    std::vector<ClassPair> path;  // visited deciders, root first
};

/// Walks from the root: prediction i descends left, j descends right, until a leaf.
[[nodiscard]] DcsvmPrediction classify(const DcsvmModel &model, std::span<const double> x);

}  // namespace dcsvm
