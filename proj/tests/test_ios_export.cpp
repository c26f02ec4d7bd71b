#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adkit/ios_export.hpp"
#include "adkit/workload.hpp"

using namespace adkit;

namespace {

const SuffixTable kSuffixes;

std::vector<FilterRule> rules_of(const std::vector<std::string>& lines) {
    std::string text;
    for (const auto& line : lines) text += line + "\n";
    return parse_list(text).rules;
}

Request make_request(const std::string& url, const std::string& initiator = "https://visited.example/",
                     ResourceType type = ResourceType::Script) {
    Request request;
    request.url = url;
    request.initiator_url = initiator;
    request.resource_type = type;
    return request;
}

}  // namespace

TEST_CASE("a fully optioned rule translates field by field") {
    IosExport out =
        export_ios(rules_of({"||ads.example.com^$script,third-party,domain=news.com"}));
    REQUIRE(out.document.size() == 1);
    CHECK(out.report.skipped.empty());

    const auto& entry = out.document[0];
    const auto& trigger = entry.at("trigger");
    std::string url_filter = trigger.at("url-filter").get<std::string>();
    CHECK(url_filter.rfind("^[a-z][a-z0-9.+-]*://([^/]+\\.)?", 0) == 0);
    CHECK(trigger.at("url-filter-is-case-sensitive") == false);
    CHECK(trigger.at("resource-type") == nlohmann::ordered_json::array({"script"}));
    CHECK(trigger.at("load-type") == nlohmann::ordered_json::array({"third-party"}));
    CHECK(trigger.at("if-domain") == nlohmann::ordered_json::array({"*news.com"}));
    CHECK(entry.at("action").at("type") == "block");
    CHECK(out.exported_rule_ids[0] == "||ads.example.com^$script,third-party,domain=news.com");
}

TEST_CASE("exceptions come after every block entry") {
    IosExport out = export_ios(rules_of(
        {"@@||cdn.example.com^", "||ads.example.com^", "||track.example.com^"}));
    REQUIRE(out.document.size() == 3);
    CHECK(out.document[0].at("action").at("type") == "block");
    CHECK(out.document[1].at("action").at("type") == "block");
    CHECK(out.document[2].at("action").at("type") == "ignore-previous-rules");
    CHECK(out.exported_rule_ids[2] == "@@||cdn.example.com^");
}

TEST_CASE("inexpressible rules are skipped with a reason, never approximated") {
    IosExport out = export_ios(rules_of({"||a.example^$popup",
                                         "||b.example^$domain=x.com|~y.com",
                                         "||c.example^$object",
                                         "||d.example^"}));
    CHECK(out.document.size() == 1);
    REQUIRE(out.report.skipped.size() == 3);
    CHECK(out.report.skipped[0].reason == "unsupported rule syntax");
    CHECK(out.report.skipped[1].reason == "mixed if-domain/unless-domain");
    // $object names only part of the raw group.
    CHECK(out.report.skipped[2].rule_id == "||c.example^$object");
    CHECK(out.report.skipped[2].reason == "resource-type set not expressible");
}

TEST_CASE("negated whole-group types are expressible") {
    IosExport out = export_ios(rules_of({"||a.example^$~script"}));
    REQUIRE(out.document.size() == 1);
    auto types = out.document[0].at("trigger").at("resource-type").get<std::vector<std::string>>();
    CHECK(std::find(types.begin(), types.end(), "script") == types.end());
    CHECK(std::find(types.begin(), types.end(), "image") != types.end());
}

TEST_CASE("comment and element rules are neither exported nor reported") {
    IosExport out = export_ios(rules_of({"! comment", "example.com##.ad", "||a.example^"}));
    CHECK(out.document.size() == 1);
    CHECK(out.report.skipped.empty());
}

TEST_CASE("rule limit: throw by default, truncate on request") {
    std::vector<std::string> lines;
    for (int i = 0; i < 30; ++i) lines.push_back("/limit-rule-" + std::to_string(i) + "/*");
    lines.push_back("@@/limit-exception/*");
    std::vector<FilterRule> rules = rules_of(lines);

    ExportOptions tight;
    tight.max_rules = 10;
    CHECK_THROWS_AS(export_ios(rules, tight), RuleLimitExceeded);

    tight.truncate = true;
    IosExport out = export_ios(rules, tight);
    CHECK(out.document.size() == 10);
    CHECK(out.report.truncated);
    CHECK(out.report.exported_count == 10);
    // Truncation keeps list order within the block section.
    CHECK(out.exported_rule_ids[0] == "/limit-rule-0/*");
    CHECK(out.exported_rule_ids[9] == "/limit-rule-9/*");
}

TEST_CASE("export output is byte stable") {
    WorkloadGenerator generator(81);
    std::vector<FilterRule> rules = rules_of(generator.rule_lines(300, 0.15, true));
    IosExport a = export_ios(rules);
    IosExport b = export_ios(rules);
    CHECK(a.document.dump(2) == b.document.dump(2));
    CHECK(a.exported_rule_ids == b.exported_rule_ids);
}

TEST_CASE("document evaluation honours separator and anchor semantics") {
    IosExport out = export_ios(rules_of({"||betrad.com^$third-party"}));
    Request third = make_request("https://c.betrad.com/geo/ba.js", "https://news.site.com/");
    CHECK(evaluate_document(out.document, third, kSuffixes) == DecisionStatus::Blocked);
    Request first = make_request("https://c.betrad.com/geo/ba.js", "https://x.betrad.com/");
    CHECK(evaluate_document(out.document, first, kSuffixes) == DecisionStatus::Allowed);
    // The separator may also be the end of the URL.
    Request bare = make_request("https://betrad.com", "https://news.site.com/");
    CHECK(evaluate_document(out.document, bare, kSuffixes) == DecisionStatus::Blocked);
    Request lookalike = make_request("https://notbetrad.com/x", "https://news.site.com/");
    CHECK(evaluate_document(out.document, lookalike, kSuffixes) == DecisionStatus::Allowed);
}

TEST_CASE("document evaluation is case-insensitive unless match-case") {
    IosExport relaxed = export_ios(rules_of({"/ads/*"}));
    CHECK(evaluate_document(relaxed.document, make_request("https://a.com/ADS/x.js"),
                            kSuffixes) == DecisionStatus::Blocked);
    IosExport strict = export_ios(rules_of({"/ads/*$match-case"}));
    CHECK(evaluate_document(strict.document, make_request("https://a.com/ADS/x.js"),
                            kSuffixes) == DecisionStatus::Allowed);
    CHECK(evaluate_document(strict.document, make_request("https://a.com/ads/x.js"),
                            kSuffixes) == DecisionStatus::Blocked);
}

TEST_CASE("exception flips a block to excepted in document order") {
    IosExport out = export_ios(rules_of({"||ads.example.com^", "@@||ads.example.com^$script"}));
    Request script = make_request("https://ads.example.com/a.js");
    CHECK(evaluate_document(out.document, script, kSuffixes) == DecisionStatus::Excepted);
    Request image = make_request("https://ads.example.com/a.png", "https://visited.example/",
                                 ResourceType::Image);
    CHECK(evaluate_document(out.document, image, kSuffixes) == DecisionStatus::Blocked);
}

TEST_CASE("verify_export finds no mismatches on an export-safe corpus") {
    WorkloadGenerator generator(91);
    std::vector<FilterRule> rules = rules_of(generator.rule_lines(400, 0.15, true));
    IosExport out = export_ios(rules);

    std::vector<Request> corpus;
    for (const auto& rule : rules) {
        if (rule.is_matchable()) corpus.push_back(generator.matching_request(rule));
    }
    for (int i = 0; i < 1500; ++i) corpus.push_back(generator.random_request());

    std::vector<ExportMismatch> mismatches = verify_export(rules, out, corpus, kSuffixes);
    CHECK(mismatches.empty());
}

TEST_CASE("verify_export ignores rules that were skipped at export time") {
    std::vector<FilterRule> rules = rules_of({"||ads.example.com^$object"});
    IosExport out = export_ios(rules);
    CHECK(out.document.empty());
    std::vector<Request> corpus{
        make_request("https://ads.example.com/x.swf", "https://visited.example/",
                     ResourceType::Object)};
    // The engine side drops the skipped rule too, so both say Allowed.
    CHECK(verify_export(rules, out, corpus, kSuffixes).empty());
}

TEST_CASE("empty list exports an empty document") {
    IosExport out = export_ios({});
    CHECK(out.document.is_array());
    CHECK(out.document.empty());
    CHECK(out.report.exported_count == 0);
    CHECK(verify_export({}, out, {make_request("https://a.com/x")}, kSuffixes).empty());
}
