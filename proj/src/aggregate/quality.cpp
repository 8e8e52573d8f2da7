#include "qualdash/aggregate/quality.hpp"

#include "qualdash/aggregate/filter.hpp"

namespace qualdash::aggregate {

const FieldQuality* QualityStats::find(std::string_view field) const {
    for (const auto& f : fields) {
        if (f.field == field) return &f;
    }
    return nullptr;
}

std::string QualityStats::summary() const {
    return std::to_string(records_with_missing) + " missing / " + std::to_string(records_with_invalid) +
           " invalid of " + std::to_string(metric_total) + " records";
}

QualityStats quality_stats(const dataio::DataTable& table, const mss::MetricSpec& spec, const Timeframe& tf,
                           std::string_view xfield) {
    enum class Status { valid, missing, invalid };

    const std::vector<std::string> names = mss::measure_fields(spec);
    std::vector<std::size_t> cols;
    // union of valid lists per field; a field constrained by any measure is checked
    std::vector<std::vector<const std::vector<mss::Literal>*>> lists(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        cols.push_back(column_of(table, names[i]));
        for (const auto& [mname, measure] : spec.measures) {
            if (const auto* l = mss::find_entry(measure.valid, names[i])) lists[i].push_back(l);
        }
    }
    auto index_of = [&](const std::string& f) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == f) return i;
        }
        return names.size();
    };
    std::vector<std::pair<std::size_t, std::size_t>> intervals;  // (start index, end index) into names
    for (const auto& [mname, measure] : spec.measures) {
        if (measure.is_interval()) intervals.emplace_back(index_of(*measure.start), index_of(*measure.end));
    }

    QualityStats out;
    for (const auto& n : names) out.fields.push_back(FieldQuality{n});
    std::vector<Status> status(names.size());
    for (std::size_t r : rows_in_timeframe(table, xfield, tf)) {
        const auto& rec = table.rows()[r];
        ++out.metric_total;
        for (std::size_t i = 0; i < names.size(); ++i) {
            const dataio::Value& v = rec[cols[i]];
            if (dataio::is_missing(v)) {
                status[i] = Status::missing;
                continue;
            }
            status[i] = Status::valid;
            for (const auto* l : lists[i]) {
                if (!in_valid_list(v, *l)) {
                    status[i] = Status::invalid;
                    break;
                }
            }
        }
        for (auto [s, e] : intervals) {
            auto start = dataio::as_date(rec[cols[s]]);
            auto end = dataio::as_date(rec[cols[e]]);
            if (start && end && *end < *start && status[s] == Status::valid) status[s] = Status::invalid;
        }
        bool any_missing = false, any_invalid = false;
        for (std::size_t i = 0; i < names.size(); ++i) {
            auto& fq = out.fields[i];
            ++fq.total;
            switch (status[i]) {
                case Status::valid:
                    ++fq.valid;
                    break;
                case Status::missing:
                    ++fq.missing;
                    any_missing = true;
                    break;
                case Status::invalid:
                    ++fq.invalid;
                    any_invalid = true;
                    break;
            }
        }
        out.records_with_missing += any_missing;
        out.records_with_invalid += any_invalid;
    }
    return out;
}

}  // namespace qualdash::aggregate
