// A generation is one consistent snapshot of every audit's configuration and
// data. Generations are immutable once built; the service swaps whole
// generations so a request never sees a mix of old and new state.
#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qualdash/dataio/table.hpp"
#include "qualdash/mss/config.hpp"
#include "qualdash/mss/validate.hpp"
#include "qualdash/server/config.hpp"

namespace qualdash::server {

/// Carries the findings that stopped an audit from loading.
class AuditLoadError : public std::runtime_error {
public:
    explicit AuditLoadError(mss::ValidationReport report);
    const mss::ValidationReport& report() const { return report_; }

private:
    mss::ValidationReport report_;
};

struct AuditState {
    mss::DashboardConfig config;  // field references canonicalized
    dataio::TablePtr table;
    std::vector<int> years;       // calendar years holding at least one dated record
    mss::ValidationReport report; // warnings only; errors prevent loading
    std::vector<std::string> files;
};

/// Reads, parses, validates and loads one audit. I/O, parse, data and
/// validation problems are all reported through AuditLoadError.
std::shared_ptr<const AuditState> load_audit(const AuditSource& source);

struct Generation {
    std::uint64_t id = 0;
    std::vector<std::shared_ptr<const AuditState>> audits;  // server config order

    const AuditState* find(std::string_view audit) const;
};

/// Throws AuditLoadError; a duplicate audit name is an error too.
std::shared_ptr<const Generation> load_generation(const ServerConfig& config, std::uint64_t id);

}  // namespace qualdash::server
