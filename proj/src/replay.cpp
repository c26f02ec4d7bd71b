#include "adkit/replay.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace adkit {

std::pair<int32_t, double> parse_iso8601(const std::string& text) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0;
    double sec = 0;
    int n = std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%lf", &y, &mo, &d, &h, &mi, &sec);
    if (n < 3) throw std::runtime_error("bad timestamp: " + text);
    using namespace std::chrono;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                       day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw std::runtime_error("bad date: " + text);
    sys_days days{ymd};
    int32_t day_index = static_cast<int32_t>(days.time_since_epoch().count());
    double seconds = day_index * 86400.0 + h * 3600.0 + mi * 60.0 + sec;
    return {day_index, seconds};
}

std::string format_iso8601(double seconds_since_epoch) {
    int64_t total = static_cast<int64_t>(seconds_since_epoch);
    int64_t day_index = total / 86400;
    int64_t rem = total - day_index * 86400;
    using namespace std::chrono;
    year_month_day ymd{sys_days{days{day_index}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                  static_cast<int>((rem / 60) % 60), static_cast<int>(rem % 60));
    return buf;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        size_t bar = line.find('|', start);
        if (bar == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, bar - start));
        start = bar + 1;
    }
    return fields;
}

}  // namespace

RequestLog parse_log(std::istream& in, const std::string& name) {
    std::string line;
    if (!std::getline(in, line)) {
        std::cerr << "warning: empty request log: " << name << "\n";
        return {};
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "reqlog v1") throw LogRejected("missing 'reqlog v1' header: " + name);

    RequestLog log;
    size_t total_lines = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++total_lines;
        std::vector<std::string> fields = split_fields(line);
        if (fields.size() < 5 || fields.size() > 7) {
            ++log.malformed_lines;
            continue;
        }
        try {
            LogRecord record;
            auto [day, seconds] = parse_iso8601(fields[0]);
            record.day = day;
            record.request.timestamp = seconds;
            record.page_url = fields[1];
            record.request.initiator_url = fields[2];
            record.request.url = fields[3];
            if (record.request.url.empty()) throw std::runtime_error("empty url");
            record.request.resource_type = resource_type_from_token(fields[4]);
            if (fields.size() >= 6 && !fields[5].empty())
                record.request.content_hash = fields[5];
            if (fields.size() >= 7 && !fields[6].empty())
                record.request.content_size = std::stoull(fields[6]);
            log.records.push_back(std::move(record));
        } catch (const std::exception&) {
            ++log.malformed_lines;
        }
    }
    if (total_lines > 0 && log.malformed_lines * 10 > total_lines) {
        throw LogRejected("more than 10% malformed lines in " + name);
    }
    if (log.malformed_lines > 0) {
        std::cerr << "warning: " << log.malformed_lines << " malformed line(s) skipped in "
                  << name << "\n";
    }
    return log;
}

RequestLog load_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open request log: " + path);
    return parse_log(in, path);
}

void write_log(const RequestLog& log, std::ostream& out) {
    out << "reqlog v1\n";
    for (const auto& record : log.records) {
        out << format_iso8601(record.request.timestamp) << '|' << record.page_url << '|'
            << record.request.initiator_url << '|' << record.request.url << '|'
            << to_string(record.request.resource_type);
        if (record.request.content_hash || record.request.content_size) {
            out << '|' << record.request.content_hash.value_or("");
            if (record.request.content_size) out << '|' << *record.request.content_size;
        }
        out << '\n';
    }
}

void write_profile(const UsageProfile& profile, std::ostream& out) {
    out << "usageprofile v1\n";
    out << "window=" << profile.start_day << ' ' << profile.end_day << '\n';
    std::vector<std::pair<std::string, uint64_t>> entries(profile.counts.begin(),
                                                          profile.counts.end());
    std::sort(entries.begin(), entries.end());
    for (const auto& [id, count] : entries) out << count << ' ' << id << '\n';
}

UsageProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open usage profile: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "usageprofile v1")
        throw std::runtime_error("missing 'usageprofile v1' header: " + path);
    UsageProfile profile;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("window=", 0) == 0) {
            std::sscanf(line.c_str(), "window=%d %d", &profile.start_day, &profile.end_day);
            continue;
        }
        size_t space = line.find(' ');
        if (space == std::string::npos)
            throw std::runtime_error("bad profile line: " + line);
        profile.counts[line.substr(space + 1)] += std::stoull(line.substr(0, space));
    }
    return profile;
}

namespace {

TimingStats timing_stats(std::vector<double>& samples_ms) {
    TimingStats stats;
    stats.samples = samples_ms.size();
    if (samples_ms.empty()) return stats;
    std::sort(samples_ms.begin(), samples_ms.end());
    auto quantile = [&](double q) {
        size_t i = static_cast<size_t>(q * (samples_ms.size() - 1));
        return samples_ms[i];
    };
    // 0.01 ms reporting resolution.
    auto round2 = [](double v) { return std::round(v * 100.0) / 100.0; };
    stats.median_ms = round2(quantile(0.5));
    stats.p90_ms = round2(quantile(0.9));
    return stats;
}

std::string etld1_of_url(const std::string& url, const SuffixTable& suffixes) {
    try {
        UrlParts parts = parse_url(url);
        if (parts.host.empty()) return "";
        return suffixes.etld_plus_one(parts.host);
    } catch (const MalformedRequest&) {
        return "";
    }
}

}  // namespace

ReplayReport replay(const RequestLog& log, Strategy& strategy, const SuffixTable& suffixes,
                    const ReplayOptions& options) {
    ReplayReport report;
    report.rule_usage.start_day = log.records.empty() ? 0 : log.records.front().day;
    report.rule_usage.end_day = log.records.empty() ? 0 : log.records.back().day;

    std::vector<double> sync_ms, async_ms;
    sync_ms.reserve(log.records.size());
    std::set<std::tuple<int32_t, std::string, std::string>> third_party_pairs;
    const size_t warmup =
        options.measure_timing ? std::min<size_t>(100, log.records.size() / 10) : 0;
    size_t seen = 0;
    using clock = std::chrono::steady_clock;

    for (const auto& record : log.records) {
        ++seen;
        Decision decision;
        try {
            if (options.measure_timing) {
                auto t0 = clock::now();
                decision = strategy.decide_sync(record.request);
                auto t1 = clock::now();
                if (seen > warmup)
                    sync_ms.push_back(
                        std::chrono::duration<double, std::milli>(t1 - t0).count());
            } else {
                decision = strategy.decide_sync(record.request);
            }
        } catch (const MalformedRequest&) {
            ++report.skipped_records;
            continue;
        }
        ++report.total_requests;
        switch (decision.status) {
            case DecisionStatus::Blocked: ++report.blocked; break;
            case DecisionStatus::Excepted: ++report.excepted; break;
            case DecisionStatus::Allowed: ++report.allowed; break;
        }
        if (decision.network_rule) ++report.rule_usage.counts[*decision.network_rule];
        if (decision.exception_rule) {
            ++report.rule_usage.counts[*decision.exception_rule];
            if (decision.status == DecisionStatus::Allowed) ++report.exception_only_allows;
        }

        if (decision.status != DecisionStatus::Blocked) {
            std::string page_etld1 = etld1_of_url(record.page_url, suffixes);
            std::string request_etld1 = etld1_of_url(record.request.url, suffixes);
            if (!page_etld1.empty() && !request_etld1.empty() && page_etld1 != request_etld1)
                third_party_pairs.emplace(record.day, page_etld1, request_etld1);
        }

        if (strategy.mode() == StrategyMode::Hybrid &&
            decision.status == DecisionStatus::Allowed && !decision.heuristic_allowed) {
            auto t0 = clock::now();
            AsyncOutcome outcome = strategy.evaluate_async(record.request, decision);
            auto t1 = clock::now();
            if (options.measure_timing && seen > warmup)
                async_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
            if (outcome.rule_id) ++report.rule_usage.counts[*outcome.rule_id];
        }
    }

    report.third_parties_contacted = third_party_pairs.size();
    report.sync_timing = timing_stats(sync_ms);
    report.async_timing = timing_stats(async_ms);
    if (strategy.mode() == StrategyMode::Hybrid) report.hybrid = strategy.snapshot_counters();
    return report;
}

UsageSummary usage_summary(const UsageProfile& profile, const RuleSet& full_rules) {
    UsageSummary summary;
    std::vector<uint64_t> counts;
    for (uint32_t ordinal : full_rules.matchable()) {
        auto it = profile.counts.find(full_rules.rule(ordinal).id);
        counts.push_back(it == profile.counts.end() ? 0 : it->second);
    }
    summary.total_rules = counts.size();
    if (counts.empty()) return summary;

    size_t zero = 0, low = 0, mid = 0, high = 0;
    for (uint64_t c : counts) {
        if (c == 0) ++zero;
        else if (c <= 100) ++low;
        else if (c <= 1000) ++mid;
        else ++high;
    }
    double n = static_cast<double>(counts.size());
    summary.used_rules = counts.size() - zero;
    summary.used_fraction = summary.used_rules / n;
    summary.unused_fraction = zero / n;
    summary.share_zero = zero / n;
    summary.share_1_100 = low / n;
    summary.share_100_1000 = mid / n;
    summary.share_over_1000 = high / n;

    std::sort(counts.begin(), counts.end());
    for (size_t i = 0; i < counts.size(); ++i) {
        if (i + 1 < counts.size() && counts[i + 1] == counts[i]) continue;
        summary.cdf.push_back({static_cast<double>(counts[i]), (i + 1) / n});
    }
    return summary;
}

void write_report(const ReplayReport& report, std::ostream& out) {
    out << "replayreport v1\n";
    out << "total_requests=" << report.total_requests << '\n';
    out << "blocked=" << report.blocked << '\n';
    out << "excepted=" << report.excepted << '\n';
    out << "allowed=" << report.allowed << '\n';
    out << "skipped_records=" << report.skipped_records << '\n';
    out << "third_parties_contacted=" << report.third_parties_contacted << '\n';
    out << "exception_only_allows=" << report.exception_only_allows << '\n';
    if (report.hybrid) {
        const StrategyCounters& h = *report.hybrid;
        out << "hot_size_start=" << h.hot_size_start << '\n';
        out << "hot_size_end=" << h.hot_size_end << '\n';
        out << "cold_size=" << h.cold_size << '\n';
        out << "late_blocks=" << h.late_blocks << '\n';
        out << "late_exceptions=" << h.late_exceptions << '\n';
        out << "promotions=" << h.promotions << '\n';
    }
    out << "[usage]\n";
    std::vector<std::pair<std::string, uint64_t>> entries(report.rule_usage.counts.begin(),
                                                          report.rule_usage.counts.end());
    std::sort(entries.begin(), entries.end());
    for (const auto& [id, count] : entries) out << count << ' ' << id << '\n';
}

void write_timing(const ReplayReport& report, std::ostream& out) {
    char buf[64];
    out << "timing v1\n";
    std::snprintf(buf, sizeof buf, "sync_median_ms=%.2f\n", report.sync_timing.median_ms);
    out << buf;
    std::snprintf(buf, sizeof buf, "sync_p90_ms=%.2f\n", report.sync_timing.p90_ms);
    out << buf;
    out << "sync_samples=" << report.sync_timing.samples << '\n';
    if (report.async_timing.samples > 0) {
        std::snprintf(buf, sizeof buf, "async_median_ms=%.2f\n", report.async_timing.median_ms);
        out << buf;
        std::snprintf(buf, sizeof buf, "async_p90_ms=%.2f\n", report.async_timing.p90_ms);
        out << buf;
        out << "async_samples=" << report.async_timing.samples << '\n';
    }
}

}  // namespace adkit
