#include "qualdash/mss/dictionary.hpp"

#include <array>
#include <stdexcept>

#include "json.hpp"

namespace qualdash::mss {

namespace {

constexpr std::array<std::pair<std::string_view, FieldType>, 5> kTypes{{{"quantitative", FieldType::quantitative},
                                                                       {"nominal", FieldType::nominal},
                                                                       {"ordinal", FieldType::ordinal},
                                                                       {"temporal", FieldType::temporal},
                                                                       {"boolean", FieldType::boolean}}};

}  // namespace

std::string_view to_string(FieldType t) {
    for (const auto& [name, value] : kTypes) {
        if (value == t) return name;
    }
    return "?";
}

std::optional<FieldType> parse_field_type(std::string_view s) {
    for (const auto& [name, value] : kTypes) {
        if (name == s) return value;
    }
    return std::nullopt;
}

DataDictionary::DataDictionary(std::vector<FieldInfo> fields) {
    for (auto& f : fields) add(std::move(f));
}

void DataDictionary::add(FieldInfo info) {
    if (info.description.empty()) {
        throw std::invalid_argument("field '" + info.name + "' has an empty description");
    }
    if (index_.count(info.name)) {
        throw std::invalid_argument("field '" + info.name + "' declared twice");
    }
    index_.emplace(info.name, fields_.size());
    fields_.push_back(std::move(info));
}

const FieldInfo* DataDictionary::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &fields_[it->second];
}

DataDictionary parse_dictionary(std::string_view text) {
    using json = nlohmann::ordered_json;
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("SyntaxError", "", "byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("MalformedValue", "", "dictionary must be an object");

    DataDictionary dict;
    for (const auto& [name, entry] : doc.items()) {
        const std::string path = "/" + name;
        if (!entry.is_object()) throw ConfigError("MalformedValue", path, "expected an object");
        auto type_it = entry.find("type");
        auto desc_it = entry.find("description");
        if (type_it == entry.end() || !type_it->is_string()) {
            throw ConfigError("MissingKey", path + "/type", "type is required");
        }
        auto type = parse_field_type(type_it->get<std::string>());
        if (!type) throw ConfigError("MalformedValue", path + "/type", "unknown field type");
        if (desc_it == entry.end() || !desc_it->is_string() || desc_it->get<std::string>().empty()) {
            throw ConfigError("MissingKey", path + "/description", "a non-empty description is required");
        }
        dict.add(FieldInfo{name, *type, desc_it->get<std::string>()});
    }
    return dict;
}

std::string serialize_dictionary(const DataDictionary& dict) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto& f : dict.fields()) {
        doc[f.name] = {{"type", std::string(to_string(f.type))}, {"description", f.description}};
    }
    return doc.dump(2) + "\n";
}

}  // namespace qualdash::mss
