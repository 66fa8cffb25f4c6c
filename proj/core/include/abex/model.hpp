// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

/**
 * \file model.hpp
 *
 * Core representation of gradient-boosted tree classifiers: attribute
 * schemas, split conditions, regression trees, per-class forests, and the
 * classifier built from them. Evaluation is exact and deterministic; tree
 * weights are summed as 64-bit floats in tree order and all comparisons are
 * strict, with no tolerance.
 */

#ifndef ABEX_MODEL_HPP
#define ABEX_MODEL_HPP

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace abex {

/// Raised on malformed models, schema mismatches, and parse failures.
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

enum class AttrKind : std::uint8_t { Numerical, Categorical, Boolean };

const char* to_string(AttrKind kind);

/// A single attribute: name, kind, and (for categorical attributes) the
/// declared category labels. Category values are referred to by their index
/// in `categories` everywhere outside of I/O.
struct Attribute {
    std::string name;
    AttrKind kind = AttrKind::Numerical;
    std::vector<std::string> categories;

    std::size_t category_count() const { return categories.size(); }
};

/// Ordered attribute list. Attribute i is identified by its index.
class AttributeSchema {
public:
    AttributeSchema() = default;

    /// Validates: unique names, categorical attributes declare at least one
    /// and at most 64 categories with unique labels.
    explicit AttributeSchema(std::vector<Attribute> attributes);

    std::size_t size() const { return attributes_.size(); }
    const Attribute& operator[](std::size_t i) const { return attributes_[i]; }
    const std::vector<Attribute>& attributes() const { return attributes_; }

    /// Index of the attribute with the given name, or -1.
    std::int32_t attribute_index(const std::string& name) const;

    /// Index of `label` among attribute i's categories, or -1.
    std::int32_t category_index(std::size_t i, const std::string& label) const;

private:
    std::vector<Attribute> attributes_;
};

using SchemaPtr = std::shared_ptr<const AttributeSchema>;

/// An attribute value: a number, a category index, or a Boolean.
class Value {
public:
    Value() : v_(0.0) {}

    static Value number(double v) { return Value(v); }
    static Value category(std::int32_t index) { return Value(index); }
    static Value boolean(bool b) { return Value(b); }

    AttrKind kind() const { return static_cast<AttrKind>(v_.index()); }

    double number() const { return std::get<double>(v_); }
    std::int32_t category() const { return std::get<std::int32_t>(v_); }
    bool boolean() const { return std::get<bool>(v_); }

    bool operator==(const Value&) const = default;

private:
    explicit Value(double v) : v_(v) {}
    explicit Value(std::int32_t v) : v_(v) {}
    explicit Value(bool v) : v_(v) {}

    std::variant<double, std::int32_t, bool> v_;
};

/// A full assignment of values to attributes, in schema order.
using Instance = std::vector<Value>;

enum class TestKind : std::uint8_t { GreaterThan, EqualsCategory, IsTrue };

/// A Boolean test on a single attribute. Numerical tests are strict
/// (`value > threshold`), categorical tests are equality against one
/// category, Boolean tests are truth.
struct Condition {
    std::int32_t attribute = -1;
    TestKind test = TestKind::IsTrue;
    double threshold = 0.0;       // GreaterThan only
    std::int32_t category = -1;   // EqualsCategory only

    static Condition greater_than(std::int32_t attribute, double threshold) {
        return {attribute, TestKind::GreaterThan, threshold, -1};
    }
    static Condition equals_category(std::int32_t attribute, std::int32_t category) {
        return {attribute, TestKind::EqualsCategory, 0.0, category};
    }
    static Condition is_true(std::int32_t attribute) {
        return {attribute, TestKind::IsTrue, 0.0, -1};
    }

    bool operator==(const Condition&) const = default;
};

/// Evaluates a condition on a value of the matching kind.
/// Throws ModelError on a kind mismatch.
bool eval_condition(const Condition& c, const Value& v);

/// One node of a regression tree. Leaves carry a weight; internal nodes
/// carry a condition and two children. The false child is taken when the
/// condition does not hold.
struct TreeNode {
    Condition condition{};
    double weight = 0.0;
    std::int32_t false_child = -1;
    std::int32_t true_child = -1;

    bool is_leaf() const { return false_child < 0; }

    static TreeNode leaf(double weight) {
        TreeNode n;
        n.weight = weight;
        return n;
    }
    static TreeNode internal(Condition c, std::int32_t false_child, std::int32_t true_child) {
        TreeNode n;
        n.condition = c;
        n.false_child = false_child;
        n.true_child = true_child;
        return n;
    }
};

/// A regression tree stored as a flat node array; the root is node 0.
struct Tree {
    std::vector<TreeNode> nodes;

    std::size_t node_count() const { return nodes.size(); }
};

/// Weight of the leaf reached by descending from the root.
double eval_tree(const Tree& tree, const Instance& x);

/// Node id of the leaf reached by descending from the root.
std::int32_t eval_tree_leaf(const Tree& tree, const Instance& x);

/// An ensemble of regression trees voting for one class.
struct Forest {
    std::vector<Tree> trees;
    std::int32_t class_id = 1;

    std::size_t node_count() const;
};

/// Sum of the tree weights, in tree order.
double eval_forest(const Forest& forest, const Instance& x);

/// A boosted-tree classifier: one forest (binary classification, classes
/// {0, 1}) or m >= 2 forests (multi-class, classes 1..m). `tie_class` is
/// returned when all forest weights are pairwise equal in the multi-class
/// case.
struct BoostedTree {
    SchemaPtr schema;
    std::vector<Forest> forests;
    std::int32_t tie_class = 1;

    bool is_binary() const { return forests.size() == 1; }
    std::size_t class_count() const { return is_binary() ? 2 : forests.size(); }
    std::size_t attribute_count() const { return schema ? schema->size() : 0; }
    std::size_t node_count() const;
};

/// Per-forest weights w(F^j, x), in forest order.
std::vector<double> forest_weights(const BoostedTree& bt, const Instance& x);

/// Predicted class. Binary: 1 iff w(F, x) > 0, else 0. Multi-class: the
/// class whose forest weight is strictly greater than every other; if all
/// weights are pairwise equal, `tie_class`; if a maximum is shared by a
/// strict subset of classes, the smallest such class id.
std::int32_t classify(const BoostedTree& bt, const Instance& x);

/// Structural and semantic validation: schema/condition kind consistency,
/// child indices acyclic and in range, class ids well formed, and every
/// root-to-leaf path satisfiable. Throws ModelError with a location
/// diagnostic on the first violation.
void validate_model(const BoostedTree& bt);

/// Checks that x conforms to the schema (length, kinds, category ranges).
void validate_instance(const AttributeSchema& schema, const Instance& x);

/// A subset of an instance's characteristics: the candidate explanation
/// { (A_i = v_i) : i kept }.
struct Term {
    Instance instance;
    std::vector<bool> kept;

    static Term full(Instance x) {
        Term t;
        t.kept.assign(x.size(), true);
        t.instance = std::move(x);
        return t;
    }
    static Term empty(Instance x) {
        Term t;
        t.kept.assign(x.size(), false);
        t.instance = std::move(x);
        return t;
    }
    static Term of_indices(Instance x, const std::vector<std::int32_t>& indices);

    std::size_t attribute_count() const { return instance.size(); }
    std::size_t size() const;
    bool keeps(std::size_t i) const { return kept[i]; }
    std::vector<std::int32_t> kept_indices() const;

    Term without(std::size_t i) const {
        Term t = *this;
        t.kept[i] = false;
        return t;
    }
};

/// True iff a's kept set is a subset of b's (both over the same instance).
bool term_subset(const Term& a, const Term& b);

/// Orders kept-index sets: first by size, then lexicographically.
/// Used to break ties among equally short explanations reproducibly.
bool term_less(const Term& a, const Term& b);

} // namespace abex

#endif // ABEX_MODEL_HPP
