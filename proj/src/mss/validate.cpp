#include "qualdash/mss/validate.hpp"

#include <set>
#include <sstream>

namespace qualdash::mss {

namespace {

class Validator {
public:
    Validator(const DashboardConfig& config, const DataDictionary& dict) : config_(config), dict_(dict) {}

    ValidationReport run() {
        check_field(config_.xfield, "/xfield", true);
        if (config_.primary_key) check_field(*config_.primary_key, "/primary_key", false);

        std::set<std::string> names;
        for (std::size_t i = 0; i < config_.metrics.size(); ++i) {
            const auto& spec = config_.metrics[i];
            const std::string path = "/metrics/" + std::to_string(i);
            if (spec.metric.empty()) error(path + "/metric", codes::kEmptyName, "metric title is empty");
            if (!names.insert(spec.metric).second) {
                error(path + "/metric", codes::kDuplicateMetric, "metric '" + spec.metric + "' is declared twice");
            }
            check_metric(spec, path);
        }
        return std::move(report_);
    }

private:
    void check_metric(const MetricSpec& spec, const std::string& path) {
        if (spec.xfield) check_field(*spec.xfield, path + "/data/xfield", true);

        const std::string fpath = path + "/yfilters";
        if (spec.measures.empty()) {
            error(fpath, codes::kNoMeasures, "a metric needs at least one measure");
        } else if (spec.measures.size() > kMaxMeasures) {
            error(fpath, codes::kTooManyMeasures,
                  std::to_string(spec.measures.size()) + " measures declared; at most " + std::to_string(kMaxMeasures) +
                      " fit on one card, split the metric across cards");
        }

        for (const auto& [name, rule] : spec.yaggregates) {
            if (!spec.find_measure(name)) {
                error(path + "/yaggregates/" + name, codes::kUndeclaredMeasure,
                      "rule given for undeclared measure '" + name + "'");
            }
        }
        std::set<RuleKind> kinds;
        for (const auto& [name, measure] : spec.measures) kinds.insert(spec.rule_for(name));
        for (const auto& [name, rule] : spec.yaggregates) kinds.insert(rule);
        if (kinds.size() > kMaxRuleKinds) {
            error(path + "/yaggregates", codes::kTooManyRuleKinds,
                  std::to_string(kinds.size()) + " distinct aggregation rules; at most " +
                      std::to_string(kMaxRuleKinds) + " are allowed");
        }

        for (const auto& [name, measure] : spec.measures) {
            check_measure(measure, spec.rule_for(name), fpath + "/" + name);
        }

        const auto& sub = spec.subsidiary;
        for (std::size_t i = 0; i < sub.categories.size(); ++i) {
            check_field(sub.categories[i], path + "/categories/" + std::to_string(i), false);
        }
        if (sub.quantities.size() > kMaxQuantities) {
            error(path + "/quantities", codes::kTooManyQuantities,
                  std::to_string(sub.quantities.size()) + " quantities; at most " + std::to_string(kMaxQuantities) +
                      " tabs are allowed");
        }
        for (std::size_t i = 0; i < sub.quantities.size(); ++i) {
            check_field(sub.quantities[i].field, path + "/quantities/" + std::to_string(i) + "/field", false);
        }
        for (const auto& [unit, measures] : sub.times) {
            for (const auto& m : measures) {
                if (!spec.find_measure(m)) {
                    error(path + "/times/" + std::string(to_string(unit)), codes::kUndeclaredMeasure,
                          "times lists undeclared measure '" + m + "'");
                }
            }
        }
        if (sub.tspan && *sub.tspan < 1) {
            error(path + "/tspan", codes::kTspanOutOfRange, "tspan must be at least 1 year");
        }
        if (spec.event) {
            check_field(spec.event->date, path + "/event/date", true);
            check_field(spec.event->id, path + "/event/id", false);
        }
    }

    void check_measure(const MeasureSpec& m, RuleKind rule, const std::string& path) {
        for (const auto& clause : m.where) check_field(clause.field, path + "/where/" + clause.field, false);
        for (const auto& [field, values] : m.valid) check_field(field, path + "/valid/" + field, false);
        if (m.field) check_field(*m.field, path + "/field", false);

        if (m.start.has_value() != m.end.has_value()) {
            error(path + "/where/" + (m.start ? "start" : "end"), codes::kUnpairedInterval,
                  "start and end must be given together");
        }
        if (m.start) check_field(*m.start, path + "/where/start", true);
        if (m.end) check_field(*m.end, path + "/where/end", true);

        if (m.is_interval()) {
            if (rule != RuleKind::count && rule != RuleKind::sum && rule != RuleKind::running_sum) {
                error(path, codes::kIntervalRule,
                      "interval measures count days; rule '" + std::string(to_string(rule)) + "' does not apply");
            }
            if (m.field) error(path + "/field", codes::kUnexpectedValueField, "interval measures take no value field");
            return;
        }
        const bool needs_field =
            rule == RuleKind::sum || rule == RuleKind::average || rule == RuleKind::running_average;
        if (needs_field && !m.field) {
            error(path, codes::kMissingValueField,
                  "rule '" + std::string(to_string(rule)) + "' needs a value field");
        }
        if (rule == RuleKind::count && m.field) {
            error(path + "/field", codes::kUnexpectedValueField, "count measures take no value field");
        }
    }

    void check_field(const std::string& name, const std::string& path, bool temporal) {
        const std::string canonical = config_.resolve_field(name);
        const FieldInfo* info = dict_.find(canonical);
        if (!info) {
            error(path, codes::kUnknownField, "field '" + canonical + "' is not in the data dictionary");
            return;
        }
        if (temporal && info->type != FieldType::temporal) {
            error(path, codes::kNotTemporal, "field '" + canonical + "' is not temporal");
        }
    }

    void error(std::string path, const char* code, std::string message) {
        report_.errors.push_back({std::move(path), code, std::move(message)});
    }

    const DashboardConfig& config_;
    const DataDictionary& dict_;
    ValidationReport report_;
};

}  // namespace

ValidationReport validate_config(const DashboardConfig& config, const DataDictionary& dict) {
    return Validator(config, dict).run();
}

std::string render_report(const ValidationReport& report) {
    std::ostringstream out;
    for (const auto& d : report.errors) out << d.path << ": " << d.code << ": " << d.message << "\n";
    for (const auto& d : report.warnings) out << "warning: " << d.path << ": " << d.code << ": " << d.message << "\n";
    return out.str();
}

}  // namespace qualdash::mss
