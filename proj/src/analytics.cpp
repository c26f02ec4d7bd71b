#include "adkit/analytics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "adkit/match.hpp"

namespace adkit {

std::vector<FilterRule> reduce_list(const std::vector<FilterRule>& full_rules,
                                    const UsageProfile& profile, uint64_t min_count) {
    std::vector<FilterRule> out;
    for (const auto& rule : full_rules) {
        if (!rule.is_matchable()) continue;
        auto it = profile.counts.find(rule.id);
        if (it != profile.counts.end() && it->second >= min_count) out.push_back(rule);
    }
    return out;
}

int32_t parse_date(const std::string& yyyy_mm_dd) {
    int y = 0, m = 0, d = 0;
    if (std::sscanf(yyyy_mm_dd.c_str(), "%d-%d-%d", &y, &m, &d) != 3)
        throw std::runtime_error("bad date: " + yyyy_mm_dd);
    using namespace std::chrono;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw std::runtime_error("bad date: " + yyyy_mm_dd);
    return static_cast<int32_t>(sys_days{ymd}.time_since_epoch().count());
}

std::string format_date(int32_t day_index) {
    using namespace std::chrono;
    year_month_day ymd{sys_days{days{day_index}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

SnapshotSeries load_snapshot_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    static const std::regex name_pat(R"(^\d{4}-\d{2}-\d{2}\.txt$)");
    SnapshotSeries series;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (!std::regex_match(name, name_pat)) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        series.snapshots.push_back({parse_date(name.substr(0, 10)), ss.str()});
    }
    std::sort(series.snapshots.begin(), series.snapshots.end(),
              [](const Snapshot& a, const Snapshot& b) { return a.day < b.day; });
    for (size_t i = 1; i < series.snapshots.size(); ++i) {
        if (series.snapshots[i].day == series.snapshots[i - 1].day)
            throw std::runtime_error("duplicate snapshot date in " + dir);
    }
    return series;
}

namespace {

// Rules tracked across snapshots: everything that is not a comment line.
std::unordered_set<std::string> snapshot_rule_ids(const std::string& text) {
    std::unordered_set<std::string> ids;
    for (const auto& rule : parse_list(text).rules) {
        if (rule.kind != RuleKind::Comment && !rule.id.empty()) ids.insert(rule.id);
    }
    return ids;
}

}  // namespace

SnapshotDiff diff_snapshots(const SnapshotSeries& series) {
    if (series.snapshots.size() < 2)
        throw std::runtime_error("need at least two snapshots to diff");
    SnapshotDiff diff;
    std::unordered_map<std::string, int32_t> open;  // rule id -> first_seen

    std::unordered_set<std::string> prev = snapshot_rule_ids(series.snapshots[0].text);
    diff.sizes.emplace_back(series.snapshots[0].day, prev.size());
    for (const auto& id : prev) open.emplace(id, series.snapshots[0].day);

    for (size_t i = 1; i < series.snapshots.size(); ++i) {
        int32_t day = series.snapshots[i].day;
        std::unordered_set<std::string> cur = snapshot_rule_ids(series.snapshots[i].text);
        diff.sizes.emplace_back(day, cur.size());
        size_t inserted = 0, removed = 0;
        for (const auto& id : cur) {
            if (!prev.count(id)) {
                ++inserted;
                open.emplace(id, day);
            }
        }
        for (const auto& id : prev) {
            if (!cur.count(id)) {
                ++removed;
                auto it = open.find(id);
                RuleLifetime lt;
                lt.rule_id = id;
                lt.first_seen = it->second;
                lt.removed = day;
                lt.lifetime_days = day - it->second;
                diff.lifetimes.push_back(std::move(lt));
                open.erase(it);
            }
        }
        if (inserted) diff.insertions[day] = inserted;
        if (removed) diff.removals[day] = removed;
        prev = std::move(cur);
    }
    for (const auto& [id, first_seen] : open) {
        RuleLifetime lt;
        lt.rule_id = id;
        lt.first_seen = first_seen;
        diff.lifetimes.push_back(std::move(lt));
    }
    std::sort(diff.lifetimes.begin(), diff.lifetimes.end(),
              [](const RuleLifetime& a, const RuleLifetime& b) {
                  if (a.first_seen != b.first_seen) return a.first_seen < b.first_seen;
                  return a.rule_id < b.rule_id;
              });
    return diff;
}

std::vector<CdfPoint> lifetime_cdf(const std::vector<RuleLifetime>& lifetimes) {
    std::vector<double> days;
    for (const auto& lt : lifetimes) {
        if (lt.lifetime_days) days.push_back(static_cast<double>(*lt.lifetime_days));
    }
    if (days.empty()) throw EmptyInput("no removed rules, lifetime CDF undefined");
    std::sort(days.begin(), days.end());
    std::vector<CdfPoint> cdf;
    double n = static_cast<double>(days.size());
    for (size_t i = 0; i < days.size(); ++i) {
        if (i + 1 < days.size() && days[i + 1] == days[i]) continue;
        cdf.push_back({days[i], (i + 1) / n});
    }
    return cdf;
}

KsResult ks_two_sample(std::vector<double> sample_a, std::vector<double> sample_b) {
    if (sample_a.empty() || sample_b.empty())
        throw EmptyInput("ks_two_sample requires non-empty samples");
    std::sort(sample_a.begin(), sample_a.end());
    std::sort(sample_b.begin(), sample_b.end());
    const double na = static_cast<double>(sample_a.size());
    const double nb = static_cast<double>(sample_b.size());
    size_t i = 0, j = 0;
    double d = 0;
    while (i < sample_a.size() && j < sample_b.size()) {
        double va = sample_a[i], vb = sample_b[j];
        double v = std::min(va, vb);
        while (i < sample_a.size() && sample_a[i] == v) ++i;
        while (j < sample_b.size() && sample_b[j] == v) ++j;
        d = std::max(d, std::fabs(i / na - j / nb));
    }
    d = std::max(d, std::fabs(1.0 - (j < sample_b.size() ? j / nb : 1.0)));
    d = std::max(d, std::fabs((i < sample_a.size() ? i / na : 1.0) - 1.0));

    KsResult result;
    result.statistic = d;
    if (d <= 0) {
        result.p_value = 1;
        return result;
    }
    // Asymptotic Kolmogorov distribution with the usual finite-sample
    // correction to the effective sample size.
    double ne = na * nb / (na + nb);
    double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    double p = 0;
    double sign = 1;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        p += sign * term;
        sign = -sign;
        if (term < 1e-16) break;
    }
    result.p_value = std::clamp(2.0 * p, 0.0, 1.0);
    return result;
}

const char* to_string(EvasionHint hint) {
    switch (hint) {
        case EvasionHint::DomainChange: return "domain-change";
        case EvasionHint::FirstPartyMove: return "first-party-move";
        case EvasionHint::KeywordRemoval: return "keyword-removal";
        case EvasionHint::DimensionRemoval: return "dimension-removal";
        case EvasionHint::Unclassified: return "unclassified";
    }
    return "?";
}

namespace {

struct HashOccurrence {
    const LogRecord* record;
    std::string url_etld1;
    std::string page_etld1;
};

bool has_ad_segment(const std::string& url) {
    std::string folded = ascii_fold(url);
    size_t start = 0;
    while (start < folded.size()) {
        size_t slash = folded.find('/', start);
        std::string seg = folded.substr(start, slash == std::string::npos ? std::string::npos
                                                                          : slash - start);
        if (seg == "ad" || seg == "ads") return true;
        if (slash == std::string::npos) break;
        start = slash + 1;
    }
    return false;
}

bool has_dimension_token(const std::string& url) {
    static const std::regex pat(R"(_\d+x\d+_)");
    return std::regex_search(url, pat);
}

EvasionHint classify(const EvasionCandidate& candidate,
                     const std::vector<const HashOccurrence*>& before,
                     const std::vector<const HashOccurrence*>& after) {
    bool before_first_party = false, after_first_party = false;
    std::set<std::string> before_etld1, after_etld1;
    for (const auto* occ : before) {
        before_etld1.insert(occ->url_etld1);
        if (!occ->url_etld1.empty() && occ->url_etld1 == occ->page_etld1)
            before_first_party = true;
    }
    for (const auto* occ : after) {
        after_etld1.insert(occ->url_etld1);
        if (!occ->url_etld1.empty() && occ->url_etld1 == occ->page_etld1)
            after_first_party = true;
    }
    if (!before_first_party && after_first_party) return EvasionHint::FirstPartyMove;
    for (const auto& e : after_etld1) {
        if (!before_etld1.count(e)) return EvasionHint::DomainChange;
    }
    bool before_ads = std::any_of(candidate.urls_before.begin(), candidate.urls_before.end(),
                                  has_ad_segment);
    bool after_ads = std::any_of(candidate.urls_after.begin(), candidate.urls_after.end(),
                                 has_ad_segment);
    if (before_ads && !after_ads && !candidate.urls_after.empty())
        return EvasionHint::KeywordRemoval;
    bool before_dim = std::any_of(candidate.urls_before.begin(), candidate.urls_before.end(),
                                  has_dimension_token);
    bool after_dim = std::any_of(candidate.urls_after.begin(), candidate.urls_after.end(),
                                 has_dimension_token);
    if (before_dim && !after_dim && !candidate.urls_after.empty())
        return EvasionHint::DimensionRemoval;
    return EvasionHint::Unclassified;
}

}  // namespace

std::vector<EvasionCandidate> detect_evasions(const SnapshotSeries& series,
                                              const std::vector<RequestLog>& logs,
                                              const SuffixTable& suffixes,
                                              const EvasionParams& params) {
    std::vector<EvasionCandidate> candidates;
    if (series.snapshots.size() < 2 || logs.empty()) return candidates;
    SnapshotDiff diff = diff_snapshots(series);
    int32_t first_day = series.snapshots.front().day;
    int32_t last_day = series.snapshots.back().day;

    // Step 1: rules added inside the window that persisted long enough.
    struct TrackedRule {
        FilterRule rule;
        int32_t added;
    };
    std::vector<TrackedRule> tracked;
    for (const auto& lt : diff.lifetimes) {
        if (lt.first_seen <= first_day) continue;
        int32_t persisted = (lt.removed ? *lt.removed : last_day) - lt.first_seen;
        if (persisted < params.min_rule_persistence_days) continue;
        FilterRule rule = parse_rule(lt.rule_id);
        if (rule.kind != RuleKind::Network) continue;
        tracked.push_back({std::move(rule), lt.first_seen});
    }
    if (tracked.empty()) return candidates;
    std::sort(tracked.begin(), tracked.end(),
              [](const TrackedRule& a, const TrackedRule& b) { return a.added < b.added; });

    // Step 3 bookkeeping: group log records by content hash.
    struct HashGroup {
        std::vector<HashOccurrence> occurrences;
        std::set<std::string> urls;
        std::set<int32_t> days;
        uint64_t max_size = 0;
    };
    std::map<std::string, HashGroup> by_hash;
    for (const auto& log : logs) {
        for (const auto& record : log.records) {
            if (!record.request.content_hash || !record.request.content_size) continue;
            HashGroup& group = by_hash[*record.request.content_hash];
            HashOccurrence occ;
            occ.record = &record;
            try {
                UrlParts parts = parse_url(record.request.url);
                if (!parts.host.empty()) occ.url_etld1 = suffixes.etld_plus_one(parts.host);
                UrlParts page = parse_url(record.page_url);
                if (!page.host.empty()) occ.page_etld1 = suffixes.etld_plus_one(page.host);
            } catch (const MalformedRequest&) {
                continue;
            }
            group.occurrences.push_back(std::move(occ));
            group.urls.insert(record.request.url);
            group.days.insert(record.day);
            group.max_size = std::max(group.max_size, *record.request.content_size);
        }
    }

    for (auto& [hash, group] : by_hash) {
        if (group.max_size < params.min_size_bytes) continue;
        if (group.urls.size() < 2) continue;

        // Step 2: earliest-added tracked rule that blocked this resource.
        const TrackedRule* matched = nullptr;
        for (const auto& tr : tracked) {
            for (const auto& occ : group.occurrences) {
                bool hit = false;
                try {
                    hit = match_rule(tr.rule, occ.record->request, suffixes);
                } catch (const MalformedRequest&) {
                }
                if (hit) { matched = &tr; break; }
            }
            if (matched) break;
        }
        if (!matched) continue;

        // Step 4: distinct-URL churn before vs after, addition day excluded.
        EvasionCandidate candidate;
        candidate.content_hash = hash;
        candidate.rule_id = matched->rule.id;
        candidate.rule_added = matched->added;
        candidate.max_size = group.max_size;
        std::vector<const HashOccurrence*> before, after;
        std::set<int32_t> days_before, days_after;
        for (const auto& occ : group.occurrences) {
            int32_t day = occ.record->day;
            if (day < matched->added) {
                before.push_back(&occ);
                days_before.insert(day);
                candidate.urls_before.insert(occ.record->request.url);
            } else if (day > matched->added) {
                after.push_back(&occ);
                days_after.insert(day);
                candidate.urls_after.insert(occ.record->request.url);
            }
        }
        if (days_before.empty() || days_after.empty()) continue;
        candidate.rate_before =
            static_cast<double>(candidate.urls_before.size()) / days_before.size();
        candidate.rate_after =
            static_cast<double>(candidate.urls_after.size()) / days_after.size();
        if (!(candidate.rate_after > candidate.rate_before)) continue;
        candidate.hint = classify(candidate, before, after);
        candidates.push_back(std::move(candidate));
    }
    return candidates;
}

}  // namespace adkit
