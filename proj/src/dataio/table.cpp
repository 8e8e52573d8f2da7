#include "qualdash/dataio/table.hpp"

namespace qualdash::dataio {

namespace {

bool variant_fits(const Value& v, mss::FieldType type) {
    if (is_missing(v)) return true;
    switch (type) {
        case mss::FieldType::quantitative:
            return std::holds_alternative<double>(v);
        case mss::FieldType::nominal:
        case mss::FieldType::ordinal:
            return std::holds_alternative<std::string>(v);
        case mss::FieldType::temporal:
            return std::holds_alternative<Date>(v) || std::holds_alternative<std::string>(v);
        case mss::FieldType::boolean:
            return std::holds_alternative<bool>(v);
    }
    return false;
}

}  // namespace

DataTable::DataTable(mss::DataDictionary schema, std::vector<Record> rows, Provenance provenance)
    : schema_(std::move(schema)), rows_(std::move(rows)), provenance_(std::move(provenance)) {
    const auto& fields = schema_.fields();
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (rows_[r].size() != fields.size()) {
            throw DataError("record " + std::to_string(r) + " has " + std::to_string(rows_[r].size()) +
                            " slots, schema has " + std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (!variant_fits(rows_[r][c], fields[c].type)) {
                throw DataError("record " + std::to_string(r) + " field '" + fields[c].name + "' holds a value of the wrong type");
            }
        }
    }
    provenance_.rows = rows_.size();
}

std::optional<std::size_t> DataTable::column(std::string_view field) const {
    const mss::FieldInfo* info = schema_.find(field);
    if (!info) return std::nullopt;
    return static_cast<std::size_t>(info - schema_.fields().data());
}

std::size_t DataTable::require_column(std::string_view field) const {
    auto c = column(field);
    if (!c) throw DataError("unknown field '" + std::string(field) + "'");
    return *c;
}

DataTable DataTable::select_rows(const std::vector<std::size_t>& indices) const {
    std::vector<Record> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(rows_.at(i));
    return DataTable(schema_, std::move(out), provenance_);
}

DataTable DataTable::drop_column(std::string_view field) const {
    const std::size_t col = require_column(field);
    std::vector<mss::FieldInfo> fields;
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (i != col) fields.push_back(schema_.fields()[i]);
    }
    std::vector<Record> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) {
        Record rec;
        rec.reserve(r.size() - 1);
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i != col) rec.push_back(r[i]);
        }
        out.push_back(std::move(rec));
    }
    Provenance prov = provenance_;
    std::erase(prov.derived_columns, std::string(field));
    std::erase(prov.unknown_columns, std::string(field));
    return DataTable(mss::DataDictionary(std::move(fields)), std::move(out), std::move(prov));
}

DataTable concat(const std::vector<const DataTable*>& parts, std::string source) {
    if (parts.empty()) return DataTable();
    const auto& schema = parts.front()->schema();
    std::vector<Record> rows;
    Provenance prov;
    prov.source = std::move(source);
    for (const auto* p : parts) {
        if (!(p->schema() == schema)) throw DataError("cannot concatenate tables with different schemas");
        rows.insert(rows.end(), p->rows().begin(), p->rows().end());
        prov.unparseable += p->provenance().unparseable;
        prov.ragged_rows += p->provenance().ragged_rows;
    }
    prov.unknown_columns = parts.front()->provenance().unknown_columns;
    prov.derived_columns = parts.front()->provenance().derived_columns;
    return DataTable(schema, std::move(rows), std::move(prov));
}

}  // namespace qualdash::dataio
