#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "qualdash/dataio/csv.hpp"
#include "qualdash/dataio/io.hpp"
#include "qualdash/dataio/synthetic.hpp"
#include "qualdash/dataio/transform.hpp"

using namespace qualdash;
using namespace qualdash::testing;
using dataio::Missing;
using dataio::Value;

namespace {

mss::DataDictionary drug_dictionary() {
    using T = mss::FieldType;
    std::vector<mss::FieldInfo> f = {{"PatientID", T::nominal, "Key"},
                                     {"AdmitDate", T::temporal, "Admission"},
                                     {"DischargeDate", T::temporal, "Discharge"}};
    for (const char* drug : {"betablocker", "aspirin", "statin", "ACEInhibitor", "P2Y12Inhibitor"}) {
        f.push_back({drug, T::boolean, "Prescribed at discharge"});
    }
    return mss::DataDictionary(f);
}

std::vector<dataio::DerivedFieldSpec> missing_one_drug() {
    return dataio::parse_derivations(read_fixture("minap_derivations.json"));
}

}  // namespace

TEST_CASE("three-row file loads with the header field present") {
    const auto t = dataio::load_table("DischargeStatus\nalive\ndeceased\nalive\n", picanet_dictionary());
    CHECK(t.row_count() == 3);
    REQUIRE(t.column("DischargeStatus"));
    CHECK(t.at(1, 0) == Value(std::string("deceased")));
}

TEST_CASE("site headers map through aliases") {
    const mss::OrderedMap<std::string> aliases = {{"dis_status", "DischargeStatus"}};
    const auto t = dataio::load_table("dis_status\nalive\n", picanet_dictionary(), aliases);
    CHECK(t.column("DischargeStatus"));
    CHECK_FALSE(t.column("dis_status"));
    CHECK(t.at(0, 0) == Value(std::string("alive")));
}

TEST_CASE("unparseable numeric cell becomes missing and is counted") {
    const auto t = dataio::load_table("EventID,PIMScore\nP1,2.5\nP2,abc\nP3,NA\n", picanet_dictionary());
    CHECK(t.at(0, 1) == Value(2.5));
    CHECK(dataio::is_missing(t.at(1, 1)));
    CHECK(dataio::is_missing(t.at(2, 1)));
    CHECK(t.provenance().unparseable == 1);
    REQUIRE(t.provenance().unparseable_by_field.size() == 1);
    CHECK(t.provenance().unparseable_by_field[0].first == "PIMScore");
}

TEST_CASE("load errors") {
    CHECK_THROWS_AS(dataio::load_table("", picanet_dictionary()), dataio::DataError);
    dataio::LoadOptions opts;
    opts.xfield = "AdmitDate";
    CHECK_THROWS_AS(dataio::load_table("EventID\nP1\n", picanet_dictionary(), {}, opts), dataio::DataError);
    const mss::OrderedMap<std::string> aliases = {{"status", "DischargeStatus"}};
    CHECK_THROWS_AS(dataio::load_table("status,DischargeStatus\na,b\n", picanet_dictionary(), aliases),
                    dataio::DataError);
}

TEST_CASE("column order is irrelevant and tabs are accepted") {
    const auto a = dataio::load_table("EventID,PIMScore\nP1,2\n", picanet_dictionary());
    const auto b = dataio::load_table("PIMScore\tEventID\n2\tP1\n", picanet_dictionary());
    CHECK(a.at(0, *a.column("PIMScore")) == b.at(0, *b.column("PIMScore")));
    CHECK(a.at(0, *a.column("EventID")) == b.at(0, *b.column("EventID")));
}

TEST_CASE("quoted fields follow RFC 4180") {
    const auto t = dataio::load_table("EventID,PrimReason\nP1,\"a, \"\"quoted\"\" reason\"\n", picanet_dictionary());
    CHECK(t.at(0, 1) == Value(std::string("a, \"quoted\" reason")));
    const std::string csv = dataio::table_to_csv(t);
    CHECK(dataio::load_table(csv, picanet_dictionary()) == t);
}

TEST_CASE("date formats") {
    CHECK(dataio::parse_date("28/01/2019") == day(2019, 1, 28));
    CHECK(dataio::parse_date("2019-01-28") == day(2019, 1, 28));
    CHECK(dataio::parse_date("28-Jan-2019") == day(2019, 1, 28));
    CHECK(dataio::parse_date("1548633600") == day(2019, 1, 28));
    CHECK_FALSE(dataio::parse_date("31/02/2019"));
    CHECK_FALSE(dataio::parse_date("2019-02-29"));
    CHECK(dataio::parse_date("2020-02-29") == day(2020, 2, 29));
    CHECK_FALSE(dataio::parse_date("yesterday"));
}

TEST_CASE("calendar validity agrees with a days-in-month oracle") {
    auto days_in = [](int y, int m) {
        static const int d[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        return m == 2 && leap ? 29 : d[m - 1];
    };
    for (int y : {1900, 2000, 2019, 2020}) {
        for (int m = 1; m <= 12; ++m) {
            for (int d = 28; d <= 31; ++d) {
                char buf[16];
                std::snprintf(buf, sizeof buf, "%02d/%02d/%04d", d, m, y);
                CAPTURE(buf);
                CHECK(dataio::parse_date(buf).has_value() == (d <= days_in(y, m)));
            }
        }
    }
}

TEST_CASE("normalize_dates converts raw text and is idempotent") {
    dataio::LoadOptions opts;
    opts.normalize_dates = false;
    const auto raw = dataio::load_table("EventID,AdmitDate\nP1,28/01/2019\nP2,2019-01-28\nP3,31/02/2019\nP4,\n",
                                        picanet_dictionary(), {}, opts);
    CHECK(raw.at(0, 1) == Value(std::string("28/01/2019")));
    const auto once = dataio::normalize_dates(raw, {"AdmitDate"});
    CHECK(once.at(0, 1) == Value(day(2019, 1, 28)));
    CHECK(once.at(1, 1) == Value(day(2019, 1, 28)));
    CHECK(dataio::is_missing(once.at(2, 1)));
    CHECK(dataio::is_missing(once.at(3, 1)));
    CHECK(once.provenance().unparseable == 1);
    CHECK(dataio::normalize_dates(once, {"AdmitDate"}) == once);
    CHECK_THROWS_AS(dataio::normalize_dates(raw, {"EventID"}), dataio::DataError);
}

TEST_CASE("missingOneDrug over the three-state operand domain") {
    const auto dict = drug_dictionary();
    // Every combination of true / false / missing for the five drugs.
    std::vector<dataio::Record> rows;
    std::vector<bool> expected;
    for (int code = 0; code < 243; ++code) {
        dataio::Record r = {std::string("M") + std::to_string(code), day(2019, 1, 1), day(2019, 1, 2)};
        bool any_not_true = false;
        for (int k = 0, c = code; k < 5; ++k, c /= 3) {
            const int state = c % 3;
            if (state == 0) r.push_back(true);
            if (state == 1) r.push_back(false);
            if (state == 2) r.push_back(Missing{});
            any_not_true = any_not_true || state != 0;
        }
        rows.push_back(std::move(r));
        expected.push_back(any_not_true);
    }
    const dataio::DataTable table(dict, rows);
    const auto derived = dataio::derive_fields(table, missing_one_drug());
    const auto col = *derived.column("missingOneDrug");
    CHECK(derived.schema().find("missingOneDrug")->type == mss::FieldType::boolean);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CAPTURE(i);
        CHECK(derived.at(i, col) == Value(bool(expected[i])));
    }
    CHECK(derived.at(0, col) == Value(false));  // all five prescribed
}

TEST_CASE("derive_fields leaves existing columns alone and can be undone") {
    const auto t = t0();
    const std::vector<dataio::DerivedFieldSpec> specs = {
        {"stay", dataio::Expr::date_diff_days("DischargeDate", "AdmitDate"), ""},
        {"died", dataio::Expr::equals("DischargeStatus", std::string("deceased")), "Died in unit"}};
    const auto d = dataio::derive_fields(t, specs);
    CHECK(d.column_count() == t.column_count() + 2);
    CHECK(d.at(0, *d.column("stay")) == Value(4.0));
    CHECK(dataio::is_missing(d.at(5, *d.column("died"))) == false);
    CHECK(d.at(5, *d.column("died")) == Value(false));
    CHECK(d.drop_column("died").drop_column("stay") == t);
    CHECK(dataio::rederive_fields(d, specs) == d);
    CHECK_THROWS_AS(dataio::derive_fields(d, specs), dataio::DataError);
    CHECK_THROWS_AS(dataio::derive_fields(t, {{"x", dataio::Expr::is_missing("Nope"), ""}}), dataio::DataError);
}

TEST_CASE("date_diff_days of equal dates is zero") {
    const dataio::DataTable t(drug_dictionary(), {{std::string("M1"), day(2019, 5, 1), day(2019, 5, 1), true, true,
                                                   true, true, true}});
    const auto d = dataio::derive_fields(t, {{"los", dataio::Expr::date_diff_days("DischargeDate", "AdmitDate"), ""}});
    CHECK(d.at(0, *d.column("los")) == Value(0.0));
}

TEST_CASE("split_annual boundaries and empty input") {
    const auto dict = picanet_dictionary();
    const auto t = dataio::load_table("EventID,AdmitDate\nP1,2018-12-31\nP2,2019-01-01\nP3,\n", dict);
    const auto p = dataio::split_annual(t, "AdmitDate");
    REQUIRE(p.years.size() == 2);
    CHECK(p.years.at(2018).row_count() == 1);
    CHECK(p.years.at(2019).row_count() == 1);
    CHECK(p.undated.row_count() == 1);

    const auto empty = dataio::split_annual(dataio::load_table("EventID,AdmitDate\n", dict), "AdmitDate");
    CHECK(empty.years.empty());
    CHECK(empty.undated.row_count() == 0);
}

TEST_CASE("property: annual partitions are disjoint and cover the input") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = random_table(rng, std::size_t(rng.between(0, 400)));
        const auto p = dataio::split_annual(t, "Admit");
        std::multiset<std::string> seen;
        for (const auto& [year, part] : p.years) {
            for (const auto& r : part.rows()) {
                CHECK(dataio::year_of(std::get<dataio::Date>(r[1])) == year);
                seen.insert(std::get<std::string>(r[0]));
            }
        }
        for (const auto& r : p.undated.rows()) {
            CHECK(dataio::is_missing(r[1]));
            seen.insert(std::get<std::string>(r[0]));
        }
        std::multiset<std::string> all;
        for (const auto& r : t.rows()) all.insert(std::get<std::string>(r[0]));
        CHECK(seen == all);
        CHECK(p.total_rows() == t.row_count());
    }
}

TEST_CASE("synthetic data is deterministic") {
    const auto profile = dataio::builtin_profile("picanet");
    const auto a = dataio::table_to_csv(dataio::generate_synthetic(7, 50, profile));
    const auto b = dataio::table_to_csv(dataio::generate_synthetic(7, 50, profile));
    CHECK(a == b);
    CHECK(a != dataio::table_to_csv(dataio::generate_synthetic(8, 50, profile)));
    const auto empty = dataio::generate_synthetic(7, 0, profile);
    CHECK(empty.row_count() == 0);
    CHECK(empty.column_count() == profile.columns.size());
    CHECK_THROWS_AS(dataio::generate_synthetic(7, -1, profile), dataio::DataError);
    CHECK_THROWS_AS(dataio::builtin_profile("nope"), dataio::DataError);
}

TEST_CASE("synthetic missingness is honoured") {
    auto profile = dataio::builtin_profile("picanet");
    profile.set_missing("DischargeStatus", 0.1);
    const auto t = dataio::generate_synthetic(7, 1000, profile);
    const auto col = *t.column("DischargeStatus");
    std::size_t missing = 0;
    for (const auto& r : t.rows()) missing += dataio::is_missing(r[col]);
    CHECK(std::abs(double(missing) / 1000.0 - 0.1) <= 0.03);
}

TEST_CASE("synthetic profiles carry the expected schemas") {
    const auto pic = dataio::generate_synthetic(1, 10, dataio::builtin_profile("picanet"));
    for (const char* f : {"AdmitDate", "DischargeDate", "DischargeStatus", "PrimReason", "AdType", "Ethnic", "PIMScore",
                          "SMR", "ventStart", "ventEnd"}) {
        CHECK(pic.column(f));
    }
    const auto minap = dataio::generate_synthetic(1, 10, dataio::builtin_profile("minap"));
    for (const char* f : {"AdmitDate", "finalDiagnosis", "callTime", "balloonTime", "betablocker", "aspirin", "statin",
                          "ACEInhibitor", "P2Y12Inhibitor", "doorToBalloon"}) {
        CHECK(minap.column(f));
    }
    const auto profile = dataio::builtin_profile("minap");
    CHECK(dataio::parse_profile(dataio::serialize_profile(profile)) == profile);
}

TEST_CASE("property: load of serialize is idempotent on canonical tables") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto profile = dataio::builtin_profile(seed == 2 ? "minap" : "picanet");
        const auto t = dataio::generate_synthetic(seed, 300, profile);
        const auto once = dataio::load_table(dataio::table_to_csv(t), t.schema());
        CHECK(once == t);
        CHECK(dataio::table_to_csv(once) == dataio::table_to_csv(t));
    }
}
