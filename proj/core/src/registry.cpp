#include "iml/registry.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "iml/error.hpp"

namespace iml {

std::vector<DatasetEntry> load_registry(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open registry: " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed registry " + path.string() + ": " + e.what());
    }

    std::vector<DatasetEntry> out;
    const auto base = path.parent_path();
    for (const auto& item : doc.at("datasets")) {
        DatasetEntry e;
        e.name = item.at("name").get<std::string>();
        e.path = item.at("path").get<std::string>();
        if (e.path.is_relative()) e.path = base / e.path;
        if (item.contains("label_column")) {
            const auto& col = item.at("label_column");
            e.label_column = col.is_number_unsigned() ? LabelColumn::index(col.get<std::size_t>())
                                                      : LabelColumn::parse(col.get<std::string>());
        }
        for (const auto& p : item.at("positive_labels"))
            e.positive_labels.insert(p.is_string() ? p.get<std::string>() : p.dump());
        const auto header = item.value("header", std::string("auto"));
        if (header == "auto") {
            e.header = CsvHeader::automatic;
        } else if (header == "present" || header == "true") {
            e.header = CsvHeader::present;
        } else if (header == "absent" || header == "false") {
            e.header = CsvHeader::absent;
        } else {
            throw Error("registry entry '" + e.name + "': unknown header mode '" + header + "'");
        }
        out.push_back(std::move(e));
    }
    return out;
}

const DatasetEntry& find_entry(const std::vector<DatasetEntry>& registry, const std::string& name) {
    const auto it = std::find_if(registry.begin(), registry.end(), [&](const auto& e) { return e.name == name; });
    if (it == registry.end()) throw Error("dataset '" + name + "' not in registry");
    return *it;
}

LabeledDataset load_entry(const DatasetEntry& entry) {
    auto raw = load_csv(entry.path, entry.label_column, entry.header);
    raw.name = entry.name;
    return binarize_labels(raw, entry.positive_labels);
}

} // namespace iml
