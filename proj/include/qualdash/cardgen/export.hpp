#pragma once

#include <string>
#include <vector>

#include "qualdash/cardgen/card.hpp"

namespace qualdash::cardgen {

struct ExportTable {
    std::vector<std::string> fields;
    std::vector<dataio::Record> rows;
    std::string metric;
    std::string selection;  // human-readable description
    std::string timestamp;

    friend bool operator==(const ExportTable&, const ExportTable&) = default;
};

/// Primary key, time field, then every field the metric references, once each.
std::vector<std::string> export_fields(const CardContext& ctx);

/// Records of the brushed cohort ordered by time field, then primary key.
/// Throws CardError for an empty selection.
ExportTable export_selection(const CardContext& ctx, const Selection& selection, std::string timestamp = {});

/// Header line plus one line per row.
std::string export_to_csv(const ExportTable& table);

}  // namespace qualdash::cardgen
