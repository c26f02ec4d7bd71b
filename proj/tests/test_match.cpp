#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adkit/match.hpp"

using namespace adkit;

namespace {

const SuffixTable kSuffixes;

Request make_request(const std::string& url, const std::string& initiator = "https://example.com/",
                     ResourceType type = ResourceType::Script) {
    Request request;
    request.url = url;
    request.initiator_url = initiator;
    request.resource_type = type;
    return request;
}

bool matches(const std::string& rule_text, const Request& request) {
    FilterRule rule = parse_rule(rule_text);
    REQUIRE(rule.is_matchable());
    return match_rule(rule, request, kSuffixes);
}

}  // namespace

TEST_CASE("corpus: path prefix rule") {
    CHECK(matches("/images/ad/*", make_request("https://etherscan.io/images/ad/ubex-20.png")));
    CHECK_FALSE(
        matches("/images/ad/*", make_request("https://etherscan.io/images/gen/ubex-20.png")));
}

TEST_CASE("corpus: dimension substring rule") {
    CHECK(matches("_160x600_",
                  make_request("https://s0.2mdn.net/dfp/x/lotto_kumulacja_160x600_009/images/"
                               "lotto_swoosh.png")));
}

TEST_CASE("corpus: betrad third-party") {
    Request third = make_request("https://c.betrad.com/geo/ba.js?r170201");
    CHECK(matches("||betrad.com^$third-party", third));
    Request first = make_request("https://c.betrad.com/geo/ba.js?r170201",
                                 "https://c.betrad.com/page");
    CHECK_FALSE(matches("||betrad.com^$third-party", first));
    // The evaded resource moved to a different domain the rule cannot see.
    CHECK_FALSE(matches("||betrad.com^$third-party",
                        make_request("https://c.evidon.com/geo/ba.js?r170201")));
}

TEST_CASE("corpus: turner domain anchor with wildcard path") {
    CHECK(matches("||turner.com^*/ads/", make_request("https://ssl.cdn.turner.com/x/ads/y.js")));
    CHECK_FALSE(matches("||turner.com^*/ads/", make_request("https://cdn.cnn.com/x/ads/y.js")));
}

TEST_CASE("domain anchor binds at label boundaries only") {
    CHECK(matches("||ads.example.com^", make_request("https://ads.example.com/x.js")));
    CHECK(matches("||ads.example.com^", make_request("https://cdn.ads.example.com/x.js")));
    CHECK_FALSE(matches("||ads.example.com^", make_request("https://badads.example.com/x.js")));
    CHECK_FALSE(matches("||example.com^", make_request("https://example.com.evil.net/x")));
}

TEST_CASE("separator semantics by ASCII enumeration") {
    FilterRule rule = parse_rule("/p^q");
    for (int c = 33; c < 127; ++c) {
        if (c == '/' || c == '#') continue;  // URL structure chars, fine to skip
        std::string url = "https://h.example/p";
        url.push_back(static_cast<char>(c));
        url += "q";
        bool expected = !is_url_word_char(static_cast<unsigned char>(c));
        CHECK_MESSAGE(match_rule(rule, make_request(url), kSuffixes) == expected,
                      "char code ", c);
    }
    // "^" also matches the end of the URL.
    CHECK(matches("/geo/ba.js^", make_request("https://c.betrad.com/geo/ba.js")));
    CHECK_FALSE(matches("/geo/ba.jsX^", make_request("https://c.betrad.com/geo/ba.js")));
}

TEST_CASE("start and end anchors") {
    CHECK(matches("|https://a.com/x", make_request("https://a.com/x.js")));
    CHECK_FALSE(matches("|https://a.com/x", make_request("http://b.net/https://a.com/x")));
    CHECK(matches("/x.js|", make_request("https://a.com/x.js")));
    CHECK_FALSE(matches("/x.js|", make_request("https://a.com/x.js?v=1")));
}

TEST_CASE("case folding unless match-case") {
    CHECK(matches("/ADS/*", make_request("https://a.com/ads/x.png")));
    CHECK_FALSE(matches("/ADS/*$match-case", make_request("https://a.com/ads/x.png")));
    CHECK(matches("/ADS/*$match-case", make_request("https://a.com/ADS/x.png")));
}

TEST_CASE("resource type options") {
    Request script = make_request("https://a.com/ads/x", "https://p.com/", ResourceType::Script);
    Request image = make_request("https://a.com/ads/x", "https://p.com/", ResourceType::Image);
    CHECK(matches("/ads/*$script", script));
    CHECK_FALSE(matches("/ads/*$script", image));
    CHECK_FALSE(matches("/ads/*$~script", script));
    CHECK(matches("/ads/*$~script", image));
}

TEST_CASE("domain option tested against the initiator host") {
    Request from_a = make_request("https://cdn.x.com/ads/1", "https://sub.a.com/page");
    Request from_c = make_request("https://cdn.x.com/ads/1", "https://c.org/page");
    CHECK(matches("/ads/*$domain=a.com", from_a));
    CHECK_FALSE(matches("/ads/*$domain=a.com", from_c));
    CHECK_FALSE(matches("/ads/*$domain=a.com|~sub.a.com", from_a));
}

TEST_CASE("party via eTLD+1") {
    // Same registrable domain across different subdomains is first-party.
    Request same = make_request("https://static.shop.co.uk/x", "https://www.shop.co.uk/");
    CHECK_FALSE(matches("/x$third-party", same));
    CHECK(matches("/x$~third-party", same));
}

TEST_CASE("malformed URL raises") {
    FilterRule rule = parse_rule("/ads/*");
    Request bad = make_request("not a url at all");
    CHECK_THROWS_AS(match_rule(rule, bad, kSuffixes), MalformedRequest);
}

TEST_CASE("etld_plus_one") {
    CHECK(kSuffixes.etld_plus_one("c.betrad.com") == "betrad.com");
    CHECK(kSuffixes.etld_plus_one("a.b.co.uk") == "b.co.uk");
    CHECK(kSuffixes.etld_plus_one("localhost") == "localhost");
    CHECK(kSuffixes.etld_plus_one("x.unknown-tld") == "x.unknown-tld");
    CHECK(kSuffixes.etld_plus_one("a.b.x.unknown-tld") == "x.unknown-tld");
}
