#ifndef ADKIT_ANALYTICS_HPP_
#define ADKIT_ANALYTICS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "adkit/filter_rule.hpp"
#include "adkit/replay.hpp"

namespace adkit {

class EmptyInput : public std::runtime_error {
  public:
    explicit EmptyInput(const std::string& what) : std::runtime_error(what) {}
};

// Network/Exception rules with profile count >= min_count, in list order.
std::vector<FilterRule> reduce_list(const std::vector<FilterRule>& full_rules,
                                    const UsageProfile& profile, uint64_t min_count);

struct Snapshot {
    int32_t day = 0;  // days since epoch
    std::string text;
};

struct SnapshotSeries {
    std::vector<Snapshot> snapshots;  // strictly increasing days
};

// Directory of YYYY-MM-DD.txt files.
SnapshotSeries load_snapshot_dir(const std::string& dir);
int32_t parse_date(const std::string& yyyy_mm_dd);
std::string format_date(int32_t day);

struct RuleLifetime {
    std::string rule_id;
    int32_t first_seen = 0;
    std::optional<int32_t> removed;
    std::optional<int32_t> lifetime_days;  // removed - first_seen
};

struct SnapshotDiff {
    std::map<int32_t, size_t> insertions;  // day -> rules added that day
    std::map<int32_t, size_t> removals;
    std::vector<std::pair<int32_t, size_t>> sizes;  // per-snapshot rule count
    std::vector<RuleLifetime> lifetimes;            // open and closed intervals
};

// Identity is canonical rule text; a re-inserted rule starts a fresh
// lifetime. Requires at least two snapshots.
SnapshotDiff diff_snapshots(const SnapshotSeries& series);

// ECDF over closed lifetimes only; throws EmptyInput when none are closed.
std::vector<CdfPoint> lifetime_cdf(const std::vector<RuleLifetime>& lifetimes);

struct KsResult {
    double statistic = 0;  // sup |ECDF_a - ECDF_b|
    double p_value = 1;    // asymptotic two-sample Kolmogorov distribution
};

KsResult ks_two_sample(std::vector<double> sample_a, std::vector<double> sample_b);

enum class EvasionHint {
    DomainChange,
    FirstPartyMove,
    KeywordRemoval,
    DimensionRemoval,
    Unclassified,
};

const char* to_string(EvasionHint hint);

struct EvasionCandidate {
    std::string content_hash;
    std::string rule_id;
    int32_t rule_added = 0;
    std::set<std::string> urls_before;
    std::set<std::string> urls_after;
    uint64_t max_size = 0;
    double rate_before = 0;  // distinct URLs per day
    double rate_after = 0;
    EvasionHint hint = EvasionHint::Unclassified;
};

struct EvasionParams {
    uint64_t min_size_bytes = 50 * 1024;
    int32_t min_rule_persistence_days = 14;
};

// Resources (by content hash) whose URL churn increased after a rule that
// blocks them was added to the list.
std::vector<EvasionCandidate> detect_evasions(const SnapshotSeries& series,
                                              const std::vector<RequestLog>& logs,
                                              const SuffixTable& suffixes,
                                              const EvasionParams& params = {});

}  // namespace adkit

#endif  // ADKIT_ANALYTICS_HPP_
