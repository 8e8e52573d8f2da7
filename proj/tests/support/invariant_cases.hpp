// One minimal config per validation invariant, each failing exactly that check.
#pragma once

#include <string>
#include <vector>

#include "qualdash/mss/dictionary.hpp"

namespace qualdash::testing {

inline mss::DataDictionary small_dictionary() {
    using T = mss::FieldType;
    return mss::DataDictionary({{"AdmitDate", T::temporal, "Admission"},
                                {"DischargeDate", T::temporal, "Discharge"},
                                {"DischargeStatus", T::nominal, "Outcome"},
                                {"PIMScore", T::quantitative, "Risk score"},
                                {"EventID", T::nominal, "Key"}});
}

inline std::string wrap_metrics(const std::string& metrics) {
    return R"({"audit":"a","xfield":"AdmitDate","metrics":[)" + metrics + "]}";
}

struct InvariantCase {
    std::string metrics;
    std::string code;
    std::string path;
};

inline std::vector<InvariantCase> invariant_cases() {
    return {
        {R"({"metric":"m"})", "NoMeasures", "/metrics/0/yfilters"},
        {R"({"metric":"m","yfilters":{"a":{},"b":{},"c":{},"d":{},"e":{},"f":{}}})", "TooManyMeasures",
         "/metrics/0/yfilters"},
        {R"({"metric":"m","yfilters":{"a":{},"b":{},"c":{"field":"PIMScore"}},
            "yaggregates":{"a":"count","b":"runningSum","c":"average"}})",
         "TooManyRuleKinds", "/metrics/0/yaggregates"},
        {R"({"metric":"m","yfilters":{"a":{}},"quantities":[
            {"field":"PIMScore","aggregate":"sum"},{"field":"PIMScore","aggregate":"sum"},
            {"field":"PIMScore","aggregate":"sum"},{"field":"PIMScore","aggregate":"sum"},
            {"field":"PIMScore","aggregate":"sum"},{"field":"PIMScore","aggregate":"sum"}]})",
         "TooManyQuantities", "/metrics/0/quantities"},
        {R"({"metric":"m","yfilters":{"a":{}},"yaggregates":{"a":"average"}})", "MissingValueField",
         "/metrics/0/yfilters/a"},
        {R"({"metric":"m","yfilters":{"a":{"field":"PIMScore"}}})", "UnexpectedValueField", "/metrics/0/yfilters/a/field"},
        {R"({"metric":"m","yfilters":{"a":{}},"times":{"month":["zzz"]}})", "UndeclaredMeasure",
         "/metrics/0/times/month"},
        {R"({"metric":"m","yfilters":{"a":{"where":{"start":"AdmitDate"}}}})", "UnpairedInterval",
         "/metrics/0/yfilters/a/where/start"},
        {R"({"metric":"m","yfilters":{"a":{"where":{"start":"AdmitDate","end":"DischargeDate"}}},
            "yaggregates":{"a":"average"}})",
         "IntervalRule", "/metrics/0/yfilters/a"},
        {R"({"metric":"m","yfilters":{"a":{}},"tspan":0})", "TspanOutOfRange", "/metrics/0/tspan"},
        {R"({"metric":"","yfilters":{"a":{}}})", "EmptyName", "/metrics/0/metric"},
        {R"({"metric":"m","yfilters":{"a":{"where":{"start":"AdmitDate","end":"PIMScore"}}}})", "NotTemporal",
         "/metrics/0/yfilters/a/where/end"},
        {R"({"metric":"m","yfilters":{"a":{"where":{"Nope":"x"}}}})", "UnknownField",
         "/metrics/0/yfilters/a/where/Nope"},
    };
}

}  // namespace qualdash::testing
