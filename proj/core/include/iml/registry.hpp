#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "iml/dataset.hpp"

namespace iml {

/// One row of the dataset registry: where the CSV lives and which raw labels
/// form the positive (minority) class.
struct DatasetEntry {
    std::string name;
    std::filesystem::path path;
    LabelColumn label_column;
    std::set<std::string> positive_labels;
    CsvHeader header = CsvHeader::automatic;
};

/// Reads a JSON registry:
///   {"datasets": [{"name": "...", "path": "x.csv", "label_column": "last",
///                  "positive_labels": ["L"], "header": "auto"}]}
/// Relative paths resolve against the registry file's directory.
std::vector<DatasetEntry> load_registry(const std::filesystem::path& path);

const DatasetEntry& find_entry(const std::vector<DatasetEntry>& registry, const std::string& name);

/// load_csv + binarize_labels; the dataset takes the entry's name.
LabeledDataset load_entry(const DatasetEntry& entry);

} // namespace iml
