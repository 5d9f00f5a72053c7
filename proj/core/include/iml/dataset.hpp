#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace iml {

enum class Label : int { negative = -1, positive = 1 };

constexpr int to_int(Label y) noexcept { return static_cast<int>(y); }
constexpr Label opposite(Label y) noexcept {
    return y == Label::positive ? Label::negative : Label::positive;
}

/// Binary-labelled feature matrix; rows are examples. Immutable once built.
///
/// The constructor enforces the shape and finiteness invariants, so any
/// LabeledDataset in hand is safe to feed to splitting, pair construction
/// and fitting.
class LabeledDataset {
public:
    LabeledDataset() = default;
    LabeledDataset(Eigen::MatrixXd features, std::vector<Label> labels, std::string name = {},
                   std::vector<std::string> feature_names = {});

    const Eigen::MatrixXd& features() const noexcept { return features_; }
    std::span<const Label> labels() const noexcept { return labels_; }
    Label label(std::size_t i) const { return labels_.at(i); }
    auto row(std::size_t i) const { return features_.row(static_cast<Eigen::Index>(i)); }

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(features_.cols()); }
    std::size_t count(Label y) const noexcept;
    bool has_both_classes() const noexcept { return count(Label::positive) > 0 && count(Label::negative) > 0; }

    const std::string& name() const noexcept { return name_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

    /// Rows in the given order (duplicates allowed).
    LabeledDataset subset(std::span<const std::size_t> rows) const;
    /// Same labels and metadata over a transformed feature matrix.
    LabeledDataset with_features(Eigen::MatrixXd features) const;

    std::vector<std::size_t> indices_of(Label y) const;

private:
    Eigen::MatrixXd features_;
    std::vector<Label> labels_;
    std::string name_;
    std::vector<std::string> feature_names_;
};

/// Parsed CSV before binarization: labels are still the raw strings.
struct RawDataset {
    Eigen::MatrixXd features;
    std::vector<std::string> labels;
    std::vector<std::string> feature_names;
    std::string name;

    std::set<std::string> distinct_labels() const { return {labels.begin(), labels.end()}; }
};

/// Which CSV column carries the label: the last one, a 0-based index, or a header name.
class LabelColumn {
public:
    struct Last {};

    LabelColumn() = default;
    static LabelColumn last() { return LabelColumn{}; }
    static LabelColumn first() { return index(0); }
    static LabelColumn index(std::size_t i);
    static LabelColumn named(std::string name);
    /// "first", "last", a non-negative integer, or otherwise a column name.
    static LabelColumn parse(const std::string& text);

    const std::variant<Last, std::size_t, std::string>& value() const noexcept { return value_; }

private:
    std::variant<Last, std::size_t, std::string> value_{Last{}};
};

enum class CsvHeader { automatic, present, absent };

RawDataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column = {},
                    CsvHeader header = CsvHeader::automatic);

/// Labels in `positive_labels` become +1, everything else -1.
LabeledDataset binarize_labels(const RawDataset& raw, const std::set<std::string>& positive_labels);

/// Per-feature z-score statistics, fitted on one dataset and applied to others.
struct Standardizer {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;  // population std, 0 mapped to 1

    static Standardizer fit(const Eigen::MatrixXd& features);
    Eigen::MatrixXd transform(const Eigen::MatrixXd& features) const;
    LabeledDataset transform(const LabeledDataset& data) const;
};

struct Normalized {
    LabeledDataset data;
    Standardizer stats;
};

Normalized normalize_zscore(const LabeledDataset& data);

struct SplitSpec {
    double train_fraction = 0.3;
    std::size_t repeats = 20;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TrainTestSplit {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    LabeledDataset train;
    LabeledDataset test;
};

/// Per-class shuffle, floor(fraction * class size) to train, leftover seats by
/// largest fractional part so the train total is round(fraction * n).
TrainTestSplit stratified_split(const LabeledDataset& data, const SplitSpec& spec, std::size_t repeat_index);

/// Index sets for k stratified folds (each class dealt round-robin after a shuffle).
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const Label> labels, std::size_t folds,
                                                       std::uint64_t seed);

} // namespace iml
