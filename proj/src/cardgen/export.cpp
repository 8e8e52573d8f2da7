#include "qualdash/cardgen/export.hpp"

#include <algorithm>
#include <sstream>

#include "qualdash/cardgen/brush.hpp"
#include "qualdash/dataio/csv.hpp"

namespace qualdash::cardgen {

std::vector<std::string> export_fields(const CardContext& ctx) {
    std::vector<std::string> out;
    auto add = [&](const std::string& f) {
        if (std::find(out.begin(), out.end(), f) == out.end() && ctx.table.column(f)) out.push_back(f);
    };
    if (ctx.primary_key) add(*ctx.primary_key);
    add(ctx.xfield);
    for (const auto& f : mss::measure_fields(ctx.spec)) add(f);
    for (const auto& f : ctx.spec.subsidiary.categories) add(f);
    for (const auto& q : ctx.spec.subsidiary.quantities) add(q.field);
    if (ctx.spec.event) {
        add(ctx.spec.event->id);
        add(ctx.spec.event->date);
    }
    return out;
}

ExportTable export_selection(const CardContext& ctx, const Selection& selection, std::string timestamp) {
    if (selection.empty()) throw CardError(ctx.spec.metric + ": nothing is selected to export");
    RowSet rows = selected_rows(ctx, selection);

    const std::size_t xcol = ctx.table.require_column(ctx.xfield);
    const auto keycol = ctx.primary_key ? ctx.table.column(*ctx.primary_key) : std::nullopt;
    std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
        const auto da = dataio::as_date(ctx.table.at(a, xcol));
        const auto db = dataio::as_date(ctx.table.at(b, xcol));
        if (da != db) return da < db;
        if (keycol) return dataio::value_text(ctx.table.at(a, *keycol)) < dataio::value_text(ctx.table.at(b, *keycol));
        return false;
    });

    ExportTable out;
    out.fields = export_fields(ctx);
    out.metric = ctx.spec.metric;
    out.selection = selection.describe();
    out.timestamp = std::move(timestamp);
    std::vector<std::size_t> cols;
    for (const auto& f : out.fields) cols.push_back(ctx.table.require_column(f));
    for (std::size_t r : rows) {
        dataio::Record rec;
        rec.reserve(cols.size());
        for (std::size_t c : cols) rec.push_back(ctx.table.at(r, c));
        out.rows.push_back(std::move(rec));
    }
    return out;
}

std::string export_to_csv(const ExportTable& table) {
    std::ostringstream out;
    dataio::write_csv_row(out, table.fields);
    std::vector<std::string> cells;
    for (const auto& rec : table.rows) {
        cells.clear();
        for (const auto& v : rec) cells.push_back(dataio::value_text(v));
        dataio::write_csv_row(out, cells);
    }
    return out.str();
}

}  // namespace qualdash::cardgen
