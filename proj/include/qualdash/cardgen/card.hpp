// View models for one metric card. A card is built from a metric
// specification, a loaded table and a timeframe; nothing here touches the
// network or the filesystem, so a card can be rebuilt anywhere from the same
// inputs and compared structurally.
#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qualdash/aggregate/breakdown.hpp"
#include "qualdash/aggregate/quality.hpp"
#include "qualdash/aggregate/series.hpp"
#include "qualdash/aggregate/serialize.hpp"
#include "qualdash/dataio/table.hpp"
#include "qualdash/mss/config.hpp"

namespace qualdash::cardgen {

using aggregate::BinSeries;
using aggregate::Distribution;
using aggregate::Granularity;
using aggregate::Json;
using aggregate::RowSet;
using aggregate::Selection;
using aggregate::Timeframe;
using mss::RuleKind;

/// Raised for requests a card cannot answer (undeclared tab, unknown
/// measure, empty export). Messages carry the metric title.
class CardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::array<std::string_view, 10> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
inline constexpr int kQuantityPaletteOffset = 5;

struct EncodingPlan {
    std::vector<std::string> bar_measures;
    std::vector<std::string> line_measures;  // secondary axis
    mss::ChartKind chart = mss::ChartKind::grouped;
    mss::OrderedMap<int> palette;           // main measure -> colour index 0..4
    mss::OrderedMap<int> quantity_palette;  // quantity field -> colour index 5..9

    friend bool operator==(const EncodingPlan&, const EncodingPlan&) = default;
};

/// Groups measures by rule kind in declaration order: the first group is
/// drawn as bars, the second as a line. Throws CardError beyond two kinds.
EncodingPlan plan_encoding(const mss::MetricSpec& spec);

struct EventInstance {
    std::string name;
    dataio::Date date;
    std::string desc;
    std::string record_id;

    std::string text() const;
    friend bool operator==(const EventInstance&, const EventInstance&) = default;
};

/// The record with the latest event date; ties go to the larger id.
std::optional<EventInstance> latest_event(const dataio::DataTable& table, const mss::EventSpec& event);

enum class CardState { entry, expanded };
std::string_view to_string(CardState s);
std::optional<CardState> parse_card_state(std::string_view s);

/// Everything a card is computed from.
struct CardContext {
    const mss::MetricSpec& spec;
    const dataio::DataTable& table;
    std::string xfield;
    Timeframe timeframe;
    std::optional<std::string> primary_key;
    Granularity granularity = Granularity::month;
    aggregate::IntervalConvention convention = aggregate::IntervalConvention::half_open;
};

struct MainView {
    std::vector<BinSeries> series;  // declaration order
    EncodingPlan encoding;
    aggregate::QualityStats quality;
    std::string quality_line;
    mss::Mark mark = mss::Mark::bar;
    std::string ylabel;
    std::vector<std::string> legend;

    friend bool operator==(const MainView&, const MainView&) = default;
};

struct CategoryTab {
    std::string field;
    std::string description;
    Distribution distribution;

    friend bool operator==(const CategoryTab&, const CategoryTab&) = default;
};

struct QuantityTab {
    std::string field;
    std::string description;
    int palette_index = kQuantityPaletteOffset;
    BinSeries series;

    friend bool operator==(const QuantityTab&, const QuantityTab&) = default;
};

struct TimesTab {
    Granularity granularity = Granularity::month;
    std::vector<std::pair<std::string, std::vector<aggregate::YearSeries>>> measures;

    friend bool operator==(const TimesTab&, const TimesTab&) = default;
};

struct Tabs {
    std::vector<CategoryTab> categories;
    std::vector<QuantityTab> quantities;
    std::vector<TimesTab> times;

    friend bool operator==(const Tabs&, const Tabs&) = default;
};

struct SelectionInfo {
    bool active = false;
    std::size_t selected = 0;  // records in the brushed cohort
    std::size_t total = 0;     // records in the card's cohort
    mss::OrderedMap<std::size_t> selected_per_measure;
    mss::OrderedMap<std::size_t> total_per_measure;

    friend bool operator==(const SelectionInfo&, const SelectionInfo&) = default;
};

struct CardViewModel {
    std::string title;
    std::string slug;
    std::string description;  // desc, quality line, event text
    CardState state = CardState::entry;
    Timeframe timeframe;
    Granularity granularity = Granularity::month;
    MainView main;
    std::optional<EventInstance> event;
    std::optional<Tabs> tabs;  // expanded state only
    SelectionInfo selection_info;

    friend bool operator==(const CardViewModel&, const CardViewModel&) = default;
};

CardViewModel build_card(const CardContext& ctx, CardState state);

std::vector<CategoryTab> build_category_tabs(const CardContext& ctx, const RowSet& cohort);
std::vector<QuantityTab> build_quantity_tabs(const CardContext& ctx, const RowSet& cohort);
std::vector<TimesTab> build_times_tabs(const CardContext& ctx);

/// Data of one sub-view tab. subview is categories, quantities or times;
/// tab names a declared field or granularity. Throws CardError otherwise.
Json build_tab(const CardContext& ctx, std::string_view subview, std::string_view tab);

SelectionInfo selection_info(const CardContext& ctx, const RowSet& cohort, const Selection& selection);

Json card_to_json(const CardViewModel& card);
Json event_to_json(const EventInstance& e);
Json encoding_to_json(const EncodingPlan& plan);
Json category_tab_to_json(const CategoryTab& tab);
Json selection_info_to_json(const SelectionInfo& info);

}  // namespace qualdash::cardgen
