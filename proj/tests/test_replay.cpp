#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <memory>
#include <sstream>

#include "adkit/replay.hpp"
#include "adkit/workload.hpp"

using namespace adkit;

namespace {

const SuffixTable kSuffixes;

std::shared_ptr<RuleSet> make_set(const std::vector<std::string>& lines) {
    std::string text;
    for (const auto& line : lines) text += line + "\n";
    return std::make_shared<RuleSet>(parse_list(text).rules);
}

StrategyConfig fullsync_config(std::shared_ptr<const RuleSet> set) {
    StrategyConfig config;
    config.mode = StrategyMode::FullSync;
    config.full_rules = std::move(set);
    return config;
}

RequestLog from_text(const std::string& text) {
    std::istringstream in(text);
    return parse_log(in, "<test>");
}

}  // namespace

TEST_CASE("iso8601 parsing and day index") {
    auto [day, seconds] = parse_iso8601("1970-01-02T00:00:30");
    CHECK(day == 1);
    CHECK(seconds == doctest::Approx(86430.0));
    CHECK(parse_iso8601("2019-02-14T10:30:00").first ==
          parse_iso8601("2019-02-14T23:59:59").first);
    CHECK(parse_iso8601("2019-02-15T00:00:00").first ==
          parse_iso8601("2019-02-14T00:00:00").first + 1);
    CHECK_THROWS(parse_iso8601("not-a-date"));
    CHECK_THROWS(parse_iso8601("2019-13-40T00:00:00"));
    CHECK(format_iso8601(86430.0) == "1970-01-02T00:00:30");
}

TEST_CASE("log header is mandatory") {
    std::istringstream in("2019-02-14T10:00:00|https://a.com/|https://a.com/|https://b.com/x|script\n");
    CHECK_THROWS_AS(parse_log(in, "<test>"), LogRejected);
}

TEST_CASE("well-formed log with optional fields") {
    RequestLog log = from_text(
        "reqlog v1\n"
        "2019-02-14T10:00:00|https://a.com/|https://a.com/|https://b.com/x.js|script\n"
        "2019-02-14T10:00:01|https://a.com/|https://a.com/|https://b.com/y.png|image|abcd1234\n"
        "2019-02-14T10:00:02|https://a.com/|https://a.com/|https://b.com/z.gif|image|ffee|81920\n");
    REQUIRE(log.records.size() == 3);
    CHECK(log.malformed_lines == 0);
    CHECK_FALSE(log.records[0].request.content_hash.has_value());
    CHECK(log.records[1].request.content_hash == "abcd1234");
    CHECK(log.records[2].request.content_size == 81920u);
    CHECK(log.records[0].request.resource_type == ResourceType::Script);
    CHECK(log.records[0].page_url == "https://a.com/");
}

TEST_CASE("a few malformed lines are skipped, too many reject the file") {
    std::string good = "2019-02-14T10:00:00|https://a.com/|https://a.com/|https://b.com/x|script\n";
    std::string bad = "garbage line\n";

    std::string tolerable = "reqlog v1\n";
    for (int i = 0; i < 19; ++i) tolerable += good;
    tolerable += bad;  // 1 in 20
    RequestLog log = from_text(tolerable);
    CHECK(log.records.size() == 19);
    CHECK(log.malformed_lines == 1);

    std::string rejected = "reqlog v1\n";
    for (int i = 0; i < 8; ++i) rejected += good;
    rejected += bad + bad;  // 2 in 10
    CHECK_THROWS_AS(from_text(rejected), LogRejected);
}

TEST_CASE("empty input yields an empty log") {
    RequestLog log = from_text("");
    CHECK(log.records.empty());
    CHECK(log.malformed_lines == 0);
}

TEST_CASE("log round-trips through write_log") {
    RequestLog log = from_text(
        "reqlog v1\n"
        "2019-02-14T10:00:00|https://a.com/|https://a.com/|https://b.com/x.js|script\n"
        "2019-02-14T10:00:02|https://a.com/|https://a.com/|https://b.com/z.gif|image|ffee|81920\n");
    std::ostringstream out;
    write_log(log, out);
    RequestLog again = from_text(out.str());
    REQUIRE(again.records.size() == log.records.size());
    for (size_t i = 0; i < log.records.size(); ++i) {
        CHECK(again.records[i].request.url == log.records[i].request.url);
        CHECK(again.records[i].request.timestamp == log.records[i].request.timestamp);
        CHECK(again.records[i].request.content_size == log.records[i].request.content_size);
    }
}

TEST_CASE("replay counts partition and statuses match the rules") {
    auto set = make_set({"||ads.example.net^", "@@||ads.example.net^$image"});
    Strategy strategy(fullsync_config(set), kSuffixes);
    RequestLog log = from_text(
        "reqlog v1\n"
        "2019-02-14T10:00:00|https://a.com/|https://a.com/|https://ads.example.net/s.js|script\n"
        "2019-02-14T10:00:01|https://a.com/|https://a.com/|https://ads.example.net/i.png|image\n"
        "2019-02-14T10:00:02|https://a.com/|https://a.com/|https://plain.example.org/i.png|image\n"
        "2019-02-14T10:00:03|https://a.com/|https://a.com/|::bad::url::|image\n");
    ReplayReport report = replay(log, strategy, kSuffixes);
    CHECK(report.total_requests == 3);
    CHECK(report.blocked == 1);
    CHECK(report.excepted == 1);
    CHECK(report.allowed == 1);
    CHECK(report.skipped_records == 1);
    CHECK(report.blocked + report.excepted + report.allowed == report.total_requests);
    CHECK(report.rule_usage.counts.at("||ads.example.net^") == 2);
    CHECK(report.rule_usage.counts.at("@@||ads.example.net^$image") == 1);
}

TEST_CASE("usage conservation under fullsync") {
    WorkloadGenerator generator(31);
    auto set = make_set(generator.rule_lines(200));
    Strategy strategy(fullsync_config(set), kSuffixes);
    RequestLog log = generator.log(*set, 800, 0.5);
    ReplayReport report = replay(log, strategy, kSuffixes);
    uint64_t total_usage = 0;
    for (const auto& [id, count] : report.rule_usage.counts) total_usage += count;
    // Blocked hits record one rule, excepted hits two, exception-only allows one.
    CHECK(total_usage ==
          report.blocked + 2 * report.excepted + report.exception_only_allows);
}

TEST_CASE("third parties are distinct (day, page, request) registrable pairs") {
    auto set = make_set({"||blocked.example^"});
    Strategy strategy(fullsync_config(set), kSuffixes);
    RequestLog log = from_text(
        "reqlog v1\n"
        // Same pair twice on the same day: one contact.
        "2019-02-14T10:00:00|https://news.site.com/a|https://news.site.com/a|https://cdn.other.net/1.js|script\n"
        "2019-02-14T11:00:00|https://blog.site.com/b|https://blog.site.com/b|https://cdn.other.net/2.js|script\n"
        // Same pair, next day: a second contact.
        "2019-02-15T10:00:00|https://news.site.com/a|https://news.site.com/a|https://cdn.other.net/1.js|script\n"
        // First-party request: not counted.
        "2019-02-14T10:00:01|https://news.site.com/a|https://news.site.com/a|https://static.site.com/app.js|script\n"
        // Blocked third party: not contacted.
        "2019-02-14T10:00:02|https://news.site.com/a|https://news.site.com/a|https://blocked.example/x.js|script\n");
    ReplayReport report = replay(log, strategy, kSuffixes);
    CHECK(report.blocked == 1);
    CHECK(report.third_parties_contacted == 2);
}

TEST_CASE("blocking more rules never increases third-party contacts") {
    WorkloadGenerator generator(41);
    auto lines = generator.rule_lines(150);
    auto full = make_set(lines);
    RequestLog log = generator.log(*full, 600, 0.5);

    std::vector<std::string> no_exceptions;
    for (const auto& line : lines)
        if (line.rfind("@@", 0) != 0) no_exceptions.push_back(line);
    auto stripped = make_set(no_exceptions);

    Strategy with_exc(fullsync_config(full), kSuffixes);
    Strategy without_exc(fullsync_config(stripped), kSuffixes);
    ReplayReport a = replay(log, with_exc, kSuffixes);
    ReplayReport b = replay(log, without_exc, kSuffixes);
    CHECK(b.blocked >= a.blocked);
    CHECK(b.third_parties_contacted <= a.third_parties_contacted);
}

TEST_CASE("usage summary fractions and buckets") {
    std::vector<std::string> lines;
    for (int i = 0; i < 10; ++i) lines.push_back("/rule-" + std::to_string(i) + "/*");
    auto set = make_set(lines);

    UsageProfile profile;
    profile.counts["/rule-3/*"] = 7;
    UsageSummary summary = usage_summary(profile, *set);
    CHECK(summary.total_rules == 10);
    CHECK(summary.used_rules == 1);
    CHECK(summary.used_fraction == doctest::Approx(0.10));
    CHECK(summary.unused_fraction == doctest::Approx(0.90));

    // 30 rules: 10 unused, 15 light, 4 medium, 1 heavy.
    lines.clear();
    for (int i = 0; i < 30; ++i) lines.push_back("/bucket-" + std::to_string(i) + "/*");
    auto big = make_set(lines);
    UsageProfile spread;
    for (int i = 10; i < 25; ++i) spread.counts["/bucket-" + std::to_string(i) + "/*"] = 50;
    for (int i = 25; i < 29; ++i) spread.counts["/bucket-" + std::to_string(i) + "/*"] = 500;
    spread.counts["/bucket-29/*"] = 5000;
    UsageSummary shares = usage_summary(spread, *big);
    CHECK(shares.share_zero == doctest::Approx(10.0 / 30.0));
    CHECK(shares.share_1_100 == doctest::Approx(15.0 / 30.0));
    CHECK(shares.share_100_1000 == doctest::Approx(4.0 / 30.0));
    CHECK(shares.share_over_1000 == doctest::Approx(1.0 / 30.0));
    REQUIRE_FALSE(shares.cdf.empty());
    CHECK(shares.cdf.back().cumulative == doctest::Approx(1.0));
    for (size_t i = 1; i < shares.cdf.size(); ++i) {
        CHECK(shares.cdf[i].value > shares.cdf[i - 1].value);
        CHECK(shares.cdf[i].cumulative > shares.cdf[i - 1].cumulative);
    }
}

TEST_CASE("profile round trip through a file") {
    UsageProfile profile;
    profile.counts["||a.example^"] = 3;
    profile.counts["@@||b.example^$script"] = 11;
    profile.start_day = 17941;
    profile.end_day = 17971;
    {
        std::ofstream out("roundtrip_profile.txt");
        write_profile(profile, out);
    }
    UsageProfile loaded = load_profile("roundtrip_profile.txt");
    CHECK(loaded.counts == profile.counts);
    CHECK(loaded.start_day == profile.start_day);
    CHECK(loaded.end_day == profile.end_day);
}

TEST_CASE("report body is deterministic, timing kept separate") {
    WorkloadGenerator generator(51);
    auto set = make_set(generator.rule_lines(100));
    RequestLog log = generator.log(*set, 300, 0.4);
    ReplayOptions options;
    options.measure_timing = false;

    Strategy first(fullsync_config(set), kSuffixes);
    Strategy second(fullsync_config(set), kSuffixes);
    ReplayReport a = replay(log, first, kSuffixes, options);
    ReplayReport b = replay(log, second, kSuffixes, options);

    std::ostringstream out_a, out_b;
    write_report(a, out_a);
    write_report(b, out_b);
    CHECK(out_a.str() == out_b.str());
    CHECK(out_a.str().find("_ms") == std::string::npos);

    std::ostringstream timing;
    write_timing(a, timing);
    CHECK(timing.str().rfind("timing v1\n", 0) == 0);
}

TEST_CASE("warm-up requests are still counted, only their timing is dropped") {
    WorkloadGenerator generator(61);
    auto set = make_set(generator.rule_lines(50));
    Strategy strategy(fullsync_config(set), kSuffixes);
    RequestLog log = generator.log(*set, 1000, 0.3);
    ReplayReport report = replay(log, strategy, kSuffixes);
    size_t valid = 0;
    for (const auto& record : log.records) {
        try {
            parse_url(record.request.url);
            ++valid;
        } catch (const MalformedRequest&) {
        }
    }
    CHECK(report.total_requests == valid);
    CHECK(report.sync_timing.samples == valid - std::min<size_t>(100, log.records.size() / 10));
}

TEST_CASE("hybrid replay populates counters and async timing") {
    WorkloadGenerator generator(71);
    auto set = make_set(generator.rule_lines(200));
    std::vector<std::string> hot;
    for (size_t i = 0; i < 20; ++i) hot.push_back(set->rule(set->matchable()[i]).id);
    StrategyConfig config;
    config.mode = StrategyMode::Hybrid;
    config.full_rules = set;
    config.hot_rule_ids = hot;
    Strategy hybrid(config, kSuffixes);
    RequestLog log = generator.log(*set, 800, 0.5);
    ReplayReport report = replay(log, hybrid, kSuffixes);
    REQUIRE(report.hybrid.has_value());
    CHECK(report.hybrid->hot_size_end ==
          report.hybrid->hot_size_start + report.hybrid->promotions);
    // Every late block promotes at least the network rule.
    CHECK(report.hybrid->promotions >= report.hybrid->late_blocks);
    std::ostringstream out;
    write_report(report, out);
    CHECK(out.str().find("promotions=") != std::string::npos);
}
