#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "qualdash/dataio/io.hpp"
#include "qualdash/mss/parser.hpp"

namespace qualdash::testing {

inline std::string fixture_path(const std::string& name) { return std::string(QUALDASH_FIXTURE_DIR) + "/" + name; }

inline std::string read_fixture(const std::string& name) { return dataio::read_file(fixture_path(name)); }

inline mss::DataDictionary picanet_dictionary() { return mss::parse_dictionary(read_fixture("picanet_dictionary.json")); }
inline mss::DataDictionary minap_dictionary() { return mss::parse_dictionary(read_fixture("minap_dictionary.json")); }
inline mss::DashboardConfig picanet_config() { return mss::parse_config(read_fixture("picanet_config.json")); }
inline mss::DashboardConfig minap_config() { return mss::parse_config(read_fixture("minap_config.json")); }

/// Six hand-enumerable admissions, Jan to Mar 2019.
inline dataio::DataTable t0() {
    dataio::LoadOptions options;
    options.xfield = "AdmitDate";
    return dataio::load_table_file(fixture_path("t0.csv"), picanet_dictionary(), {}, options);
}

inline dataio::Date day(int y, unsigned m, unsigned d) { return dataio::make_date(y, m, d); }

/// A scratch directory removed on scope exit.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() / ("qualdash-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path / name).string(); }
    void copy_fixture(const std::string& name) const {
        std::filesystem::copy_file(fixture_path(name), path / name, std::filesystem::copy_options::overwrite_existing);
    }
};

}  // namespace qualdash::testing
