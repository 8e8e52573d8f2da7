#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qualdash/mss/error.hpp"

namespace qualdash::mss {

enum class FieldType { quantitative, nominal, ordinal, temporal, boolean };

std::string_view to_string(FieldType t);
std::optional<FieldType> parse_field_type(std::string_view s);

struct FieldInfo {
    std::string name;
    FieldType type = FieldType::nominal;
    std::string description;

    friend bool operator==(const FieldInfo&, const FieldInfo&) = default;
};

/// Field catalogue supplied with an audit. Keeps declaration order; the
/// descriptions end up in card tooltips.
class DataDictionary {
public:
    DataDictionary() = default;
    explicit DataDictionary(std::vector<FieldInfo> fields);

    /// Throws std::invalid_argument on a duplicate name or an empty description.
    void add(FieldInfo info);

    bool contains(std::string_view name) const { return find(name) != nullptr; }
    const FieldInfo* find(std::string_view name) const;
    const std::vector<FieldInfo>& fields() const { return fields_; }
    std::size_t size() const { return fields_.size(); }

    friend bool operator==(const DataDictionary& a, const DataDictionary& b) {
        return a.fields_ == b.fields_;
    }

private:
    std::vector<FieldInfo> fields_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Parses `{ field: {type, description}, ... }`. Throws ConfigError.
DataDictionary parse_dictionary(std::string_view text);
std::string serialize_dictionary(const DataDictionary& dict);

}  // namespace qualdash::mss
