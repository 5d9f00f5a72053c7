#include "iml/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "iml/error.hpp"
#include "iml/random.hpp"

namespace iml {
namespace {

// Counts like fraction * size land a hair below an integer (0.3 * 30); absorb that.
constexpr double kCountSlack = 1e-9;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\"");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n\"");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string_view rest(line);
    while (true) {
        const auto comma = rest.find(',');
        cells.emplace_back(trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return cells;
}

bool parse_real(std::string_view text, double& out) {
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

std::size_t resolve_label_column(const LabelColumn& column, const std::vector<std::string>& header,
                                 std::size_t arity) {
    return std::visit(
        [&](const auto& v) -> std::size_t {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LabelColumn::Last>) {
                return arity - 1;
            } else if constexpr (std::is_same_v<T, std::size_t>) {
                if (v >= arity) throw Error("label column index " + std::to_string(v) + " out of range");
                return v;
            } else {
                const auto it = std::find(header.begin(), header.end(), v);
                if (it == header.end()) throw Error("label column '" + v + "' not found in header");
                return static_cast<std::size_t>(it - header.begin());
            }
        },
        column.value());
}

} // namespace

LabeledDataset::LabeledDataset(Eigen::MatrixXd features, std::vector<Label> labels, std::string name,
                               std::vector<std::string> feature_names)
    : features_(std::move(features)), labels_(std::move(labels)), name_(std::move(name)),
      feature_names_(std::move(feature_names)) {
    if (static_cast<std::size_t>(features_.rows()) != labels_.size())
        throw Error("feature rows (" + std::to_string(features_.rows()) + ") != labels (" +
                    std::to_string(labels_.size()) + ")");
    if (!features_.allFinite()) throw Error("non-finite feature");
    for (Label y : labels_)
        if (y != Label::positive && y != Label::negative) throw Error("label outside {-1,+1}");
    if (!feature_names_.empty() && feature_names_.size() != dim())
        throw Error("feature_names length does not match feature count");
}

std::size_t LabeledDataset::count(Label y) const noexcept {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), y));
}

std::vector<std::size_t> LabeledDataset::indices_of(Label y) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == y) out.push_back(i);
    return out;
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), features_.cols());
    std::vector<Label> y;
    y.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] >= size()) throw Error("subset row out of range");
        x.row(static_cast<Eigen::Index>(r)) = features_.row(static_cast<Eigen::Index>(rows[r]));
        y.push_back(labels_[rows[r]]);
    }
    return {std::move(x), std::move(y), name_, feature_names_};
}

LabeledDataset LabeledDataset::with_features(Eigen::MatrixXd features) const {
    auto names = features.cols() == features_.cols() ? feature_names_ : std::vector<std::string>{};
    return {std::move(features), labels_, name_, std::move(names)};
}

LabelColumn LabelColumn::index(std::size_t i) {
    LabelColumn c;
    c.value_ = i;
    return c;
}

LabelColumn LabelColumn::named(std::string name) {
    LabelColumn c;
    c.value_ = std::move(name);
    return c;
}

LabelColumn LabelColumn::parse(const std::string& text) {
    if (text.empty() || text == "last") return last();
    if (text == "first") return first();
    std::size_t i = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), i);
    if (ec == std::errc{} && ptr == text.data() + text.size()) return index(i);
    return named(text);
}

RawDataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column, CsvHeader header) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset file: " + path.string());

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) throw Error("empty dataset: " + path.string());

    const std::size_t arity = rows.front().size();
    if (arity < 2) throw Error("need at least one feature and one label column: " + path.string());
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r].size() != arity)
            throw Error("ragged row " + std::to_string(r + 1) + " in " + path.string() + ": expected " +
                        std::to_string(arity) + " cells, got " + std::to_string(rows[r].size()));

    bool has_header = header == CsvHeader::present;
    if (header == CsvHeader::automatic) {
        if (std::holds_alternative<std::string>(label_column.value())) {
            has_header = true;
        } else {
            const std::size_t label_at = resolve_label_column(label_column, {}, arity);
            double scratch = 0.0;
            for (std::size_t c = 0; c < arity && !has_header; ++c)
                if (c != label_at && !parse_real(rows.front()[c], scratch)) has_header = true;
        }
    }

    std::vector<std::string> names;
    if (has_header) {
        names = rows.front();
        rows.erase(rows.begin());
        if (rows.empty()) throw Error("empty dataset (header only): " + path.string());
    }
    const std::size_t label_at = resolve_label_column(label_column, names, arity);

    RawDataset raw;
    raw.name = path.stem().string();
    raw.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(arity - 1));
    raw.labels.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        Eigen::Index col = 0;
        for (std::size_t c = 0; c < arity; ++c) {
            if (c == label_at) {
                raw.labels.push_back(rows[r][c]);
                continue;
            }
            double v = 0.0;
            if (!parse_real(rows[r][c], v))
                throw Error("non-numeric feature cell '" + rows[r][c] + "' at row " + std::to_string(r + 1) +
                            ", column " + std::to_string(c + 1));
            if (!std::isfinite(v))
                throw Error("non-finite feature at row " + std::to_string(r + 1) + ", column " +
                            std::to_string(c + 1));
            raw.features(static_cast<Eigen::Index>(r), col++) = v;
        }
    }
    if (has_header) {
        for (std::size_t c = 0; c < arity; ++c)
            if (c != label_at) raw.feature_names.push_back(names[c]);
    }
    return raw;
}

LabeledDataset binarize_labels(const RawDataset& raw, const std::set<std::string>& positive_labels) {
    if (positive_labels.empty()) throw Error("positive label set is empty");
    const auto observed = raw.distinct_labels();
    for (const auto& p : positive_labels)
        if (!observed.contains(p)) throw Error("positive label '" + p + "' not present in dataset");
    if (positive_labels.size() >= observed.size())
        throw Error("positive labels cover every observed label; nothing left for the negative class");

    std::vector<Label> labels;
    labels.reserve(raw.labels.size());
    for (const auto& l : raw.labels)
        labels.push_back(positive_labels.contains(l) ? Label::positive : Label::negative);
    return {raw.features, std::move(labels), raw.name, raw.feature_names};
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& features) {
    if (features.rows() < 2) throw Error("z-score normalization needs at least 2 rows");
    Standardizer s;
    s.mean = features.colwise().mean();
    const Eigen::MatrixXd centered = features.rowwise() - s.mean;
    s.scale = (centered.colwise().squaredNorm() / static_cast<double>(features.rows())).cwiseSqrt();
    for (Eigen::Index j = 0; j < s.scale.size(); ++j)
        if (!(s.scale(j) > 0.0)) s.scale(j) = 1.0;
    return s;
}

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& features) const {
    if (features.cols() != mean.size()) throw Error("standardizer dimension mismatch");
    return (features.rowwise() - mean).array().rowwise() / scale.array();
}

LabeledDataset Standardizer::transform(const LabeledDataset& data) const {
    return data.with_features(transform(data.features()));
}

Normalized normalize_zscore(const LabeledDataset& data) {
    auto stats = Standardizer::fit(data.features());
    auto out = stats.transform(data);
    return {std::move(out), std::move(stats)};
}

void SplitSpec::validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw Error("train_fraction must lie in (0,1)");
    if (repeats == 0) throw Error("repeats must be positive");
}

TrainTestSplit stratified_split(const LabeledDataset& data, const SplitSpec& spec, std::size_t repeat_index) {
    spec.validate();
    const Label classes[] = {Label::positive, Label::negative};
    for (Label y : classes)
        if (data.count(y) < 2) throw Error("stratified split needs at least 2 examples per class");

    Rng rng(derive_seed(spec.seed, repeat_index));
    std::vector<std::size_t> members[2];
    std::size_t take[2];
    double remainder[2];
    std::size_t assigned = 0;
    for (int c = 0; c < 2; ++c) {
        members[c] = data.indices_of(classes[c]);
        std::shuffle(members[c].begin(), members[c].end(), rng);
        const double exact = spec.train_fraction * static_cast<double>(members[c].size());
        take[c] = static_cast<std::size_t>(std::floor(exact + kCountSlack));
        remainder[c] = std::max(0.0, exact - static_cast<double>(take[c]));
        assigned += take[c];
    }
    const auto target = static_cast<std::size_t>(
        std::floor(spec.train_fraction * static_cast<double>(data.size()) + 0.5 + kCountSlack));
    // Leftover seats go to the larger fractional part; positives win exact ties.
    const int order[2] = {remainder[1] > remainder[0] ? 1 : 0, remainder[1] > remainder[0] ? 0 : 1};
    for (int c : order) {
        if (assigned >= target) break;
        if (take[c] < members[c].size()) {
            ++take[c];
            ++assigned;
        }
    }

    TrainTestSplit out;
    for (int c = 0; c < 2; ++c) {
        if (take[c] == 0) throw Error("stratified split leaves a class without training examples");
        if (take[c] == members[c].size()) throw Error("stratified split leaves a class without test examples");
        out.train_rows.insert(out.train_rows.end(), members[c].begin(),
                              members[c].begin() + static_cast<std::ptrdiff_t>(take[c]));
        out.test_rows.insert(out.test_rows.end(), members[c].begin() + static_cast<std::ptrdiff_t>(take[c]),
                             members[c].end());
    }
    std::sort(out.train_rows.begin(), out.train_rows.end());
    std::sort(out.test_rows.begin(), out.test_rows.end());
    out.train = data.subset(out.train_rows);
    out.test = data.subset(out.test_rows);
    return out;
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const Label> labels, std::size_t folds,
                                                       std::uint64_t seed) {
    if (folds < 2) throw Error("need at least 2 folds");
    Rng rng(seed);
    std::vector<std::vector<std::size_t>> out(folds);
    std::size_t next = 0;
    for (Label y : {Label::positive, Label::negative}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == y) members.push_back(i);
        if (members.size() < folds)
            throw Error("class too small for " + std::to_string(folds) + " stratified folds (" +
                        std::to_string(members.size()) + " members)");
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t i : members) {
            out[next].push_back(i);
            next = (next + 1) % folds;
        }
    }
    for (auto& f : out) std::sort(f.begin(), f.end());
    return out;
}

} // namespace iml
