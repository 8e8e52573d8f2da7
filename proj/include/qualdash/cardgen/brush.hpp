// Linked-selection resolution. A brush is a Selection over the card's
// cohort; time, category, id and measure parts compose conjunctively.
// Each category tab's distribution ignores a category brush on its own
// field, so a brushed pie keeps showing its other slices.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qualdash/cardgen/card.hpp"

namespace qualdash::cardgen {

struct LinkedUpdate {
    Selection selection;
    std::vector<bool> highlight;               // one flag per main-view bin
    std::vector<aggregate::Bin> cohort_counts;  // records of the card cohort per bin
    std::optional<std::vector<aggregate::Bin>> overlay;  // cohort records matching the category brush
    std::vector<CategoryTab> distributions;
    SelectionInfo selection_info;
    std::vector<std::string> record_ids;  // brushed cohort, in table order

    friend bool operator==(const LinkedUpdate&, const LinkedUpdate&) = default;
};

/// Resolves a full selection. Throws CardError for a category field that
/// is not a tab of the card, a bin outside the timeframe, or an unknown
/// measure.
LinkedUpdate resolve_brush(const CardContext& ctx, const Selection& selection);

/// Replaces the time part of `current` with `bins` (empty clears it).
LinkedUpdate resolve_time_brush(const CardContext& ctx, const std::vector<dataio::Date>& bins,
                                const Selection& current = {});

/// Replaces the category part of `current`.
LinkedUpdate resolve_category_brush(const CardContext& ctx, std::string_view field, std::string_view value,
                                    const Selection& current = {});

/// Rows of the brushed cohort.
RowSet selected_rows(const CardContext& ctx, const Selection& selection);

/// Primary-key text of a row, or `#<row>` when the card has no key field.
std::string record_id(const CardContext& ctx, std::size_t row);

Json linked_update_to_json(const LinkedUpdate& update);

}  // namespace qualdash::cardgen
