#ifndef ADKIT_REPLAY_HPP_
#define ADKIT_REPLAY_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "adkit/strategy.hpp"

namespace adkit {

// Thrown when a file is structurally not a request log (bad header or more
// than 10% malformed lines) — almost always the wrong file.
class LogRejected : public std::runtime_error {
  public:
    explicit LogRejected(const std::string& what) : std::runtime_error(what) {}
};

struct LogRecord {
    Request request;
    std::string page_url;  // the visited page
    int32_t day = 0;       // days since epoch, from the timestamp
};

struct RequestLog {
    std::vector<LogRecord> records;
    size_t malformed_lines = 0;
};

// Line format: "reqlog v1" header, then
//   timestamp|page_url|initiator_url|request_url|type[|hash[|size]]
RequestLog load_log(const std::string& path);
RequestLog parse_log(std::istream& in, const std::string& name);
void write_log(const RequestLog& log, std::ostream& out);

// {day index, seconds since epoch}; throws std::runtime_error on bad input.
std::pair<int32_t, double> parse_iso8601(const std::string& text);
std::string format_iso8601(double seconds_since_epoch);

struct UsageProfile {
    std::unordered_map<std::string, uint64_t> counts;  // rule id -> matches
    int32_t start_day = 0;
    int32_t end_day = 0;
};

void write_profile(const UsageProfile& profile, std::ostream& out);
UsageProfile load_profile(const std::string& path);

struct TimingStats {
    double median_ms = 0;
    double p90_ms = 0;
    size_t samples = 0;
};

struct ReplayReport {
    size_t total_requests = 0;
    size_t blocked = 0;
    size_t excepted = 0;
    size_t allowed = 0;
    size_t skipped_records = 0;  // malformed request URLs
    size_t third_parties_contacted = 0;
    size_t exception_only_allows = 0;
    TimingStats sync_timing;
    TimingStats async_timing;  // Hybrid only
    UsageProfile rule_usage;
    std::optional<StrategyCounters> hybrid;
};

struct ReplayOptions {
    // Leading fraction of timing samples dropped as warm-up (decisions
    // still counted). Matches the reporting convention, not the matcher.
    bool measure_timing = true;
};

ReplayReport replay(const RequestLog& log, Strategy& strategy, const SuffixTable& suffixes,
                    const ReplayOptions& options = {});

struct CdfPoint {
    double value = 0;
    double cumulative = 0;
};

struct UsageSummary {
    double used_fraction = 0;
    double unused_fraction = 0;
    size_t used_rules = 0;
    size_t total_rules = 0;  // network + exception rules
    std::vector<CdfPoint> cdf;
    // Shares over rules by total match count: 0, [1,100], (100,1000], >1000.
    double share_zero = 0;
    double share_1_100 = 0;
    double share_100_1000 = 0;
    double share_over_1000 = 0;
};

UsageSummary usage_summary(const UsageProfile& profile, const RuleSet& full_rules);

// Deterministic report body; timing lives in write_timing so golden files
// stay stable across machines.
void write_report(const ReplayReport& report, std::ostream& out);
void write_timing(const ReplayReport& report, std::ostream& out);

}  // namespace adkit

#endif  // ADKIT_REPLAY_HPP_
