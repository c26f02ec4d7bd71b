#include "adkit/workload.hpp"

#include <algorithm>
#include <unordered_set>

namespace adkit {

namespace {
const char* kWords[] = {
    "banner", "track", "pixel", "widget", "media", "static", "assets", "cdn",
    "click", "count", "beacon", "promo", "sponsor", "metric", "tag", "sync",
    "video", "img", "lib", "api", "data", "page", "view", "unit", "slot",
    "zone", "serve", "delivery", "content", "creative",
};
const char* kTlds[] = {"com", "net", "org", "io"};
const char* kTypes[] = {"script", "image", "stylesheet", "xmlhttprequest",
                        "subdocument", "font", "media", "other"};
}  // namespace

WorkloadGenerator::WorkloadGenerator(uint64_t seed) : rng_(seed) {
    for (const char* w : kWords) pool_.emplace_back(w);
    // Seed-specific tokens widen the vocabulary so distinct seeds disagree.
    for (int i = 0; i < 120; ++i) {
        std::string t;
        size_t len = 4 + pick(5);
        for (size_t j = 0; j < len; ++j) t.push_back(static_cast<char>('a' + pick(26)));
        pool_.push_back(std::move(t));
    }
}

std::string WorkloadGenerator::token() { return pool_[pick(pool_.size())]; }

std::string WorkloadGenerator::host() {
    std::string h = token();
    if (chance(0.6)) h += "-" + std::to_string(pick(1000));
    h += "." + std::string(kTlds[pick(4)]);
    if (chance(0.3)) h = token() + "." + h;
    return h;
}

std::string WorkloadGenerator::random_url() {
    std::string url = chance(0.8) ? "https://" : "http://";
    url += host();
    size_t segments = pick(4);
    for (size_t i = 0; i < segments; ++i) url += "/" + token();
    url += "/" + token() + (chance(0.5) ? ".js" : ".png");
    if (chance(0.2)) url += "?" + token() + "=" + std::to_string(pick(10000));
    return url;
}

std::string WorkloadGenerator::rule_body(bool export_safe) {
    std::string body;
    switch (pick(5)) {
        case 0:  // domain-anchored
            body = "||" + host() + "^";
            if (chance(0.3)) body += "*/" + token() + "/";
            break;
        case 1:  // path fragment
            body = "/" + token() + "/" + token() + "/*";
            break;
        case 2:  // dimension-style substring
            body = "_" + std::to_string(60 + pick(700)) + "x" + std::to_string(60 + pick(700)) + "_";
            break;
        case 3:  // start-anchored
            body = "|https://" + host() + "/" + token();
            break;
        default:  // plain substring with separator
            body = token() + "-" + token() + "^";
            break;
    }
    std::vector<std::string> opts;
    if (chance(0.25)) {
        // Whole groups only, so the rule survives iOS translation when
        // export_safe callers need it to.
        static const char* safe_types[] = {"script", "image", "font", "media"};
        if (export_safe || chance(0.7))
            opts.push_back(safe_types[pick(4)]);
        else
            opts.push_back(kTypes[pick(8)]);
    }
    if (chance(0.2)) opts.push_back(chance(0.7) ? "third-party" : "~third-party");
    if (chance(0.12)) {
        std::string d = "domain=" + host();
        if (!export_safe && chance(0.3)) d += "|~" + host();
        opts.push_back(std::move(d));
    }
    if (!opts.empty()) {
        body += "$";
        for (size_t i = 0; i < opts.size(); ++i) body += (i ? "," : "") + opts[i];
    }
    return body;
}

std::vector<std::string> WorkloadGenerator::rule_lines(size_t count, double exception_fraction,
                                                       bool export_safe) {
    std::vector<std::string> lines;
    std::unordered_set<std::string> seen;
    while (lines.size() < count) {
        std::string body = rule_body(export_safe);
        if (chance(exception_fraction)) body = "@@" + body;
        if (seen.insert(body).second) lines.push_back(std::move(body));
    }
    return lines;
}

Request WorkloadGenerator::matching_request(const FilterRule& rule) {
    const PatternSpec& spec = rule.pattern;
    std::string expansion;
    for (const auto& part : spec.parts) {
        switch (part.type) {
            case PartType::Literal: expansion += part.text; break;
            case PartType::Wildcard: expansion += token(); break;
            case PartType::Separator: expansion += "/"; break;
        }
    }
    std::string url;
    switch (spec.anchor) {
        case Anchor::DomainBoundary:
            url = "https://";
            if (chance(0.4)) url += "sub.";
            url += expansion;
            break;
        case Anchor::StartOfUrl:
            url = expansion;  // generated start-anchored bodies embed the scheme
            break;
        case Anchor::None:
            url = "https://" + host() + "/" + token() + expansion;
            break;
    }
    if (!spec.end_anchored) {
        if (url.back() != '/') url += "/";
        url += token() + ".js";
    }

    Request request;
    request.url = url;
    const RuleOptions& opts = rule.options;
    if (opts.include_types != 0) {
        for (int i = 0; i < kNumRuleResourceTypes; ++i) {
            if (opts.include_types & (1u << i)) {
                request.resource_type = static_cast<ResourceType>(i);
                break;
            }
        }
    } else {
        ResourceType t = resource_type_from_token(kTypes[pick(8)]);
        while (opts.exclude_types & type_bit(t)) t = resource_type_from_token(kTypes[pick(8)]);
        request.resource_type = t;
    }
    if (!opts.domains_include.empty()) {
        request.initiator_url = "https://" + opts.domains_include[0] + "/";
    } else if (opts.party == PartyFilter::FirstOnly) {
        try {
            UrlParts parts = parse_url(url);
            request.initiator_url = "https://" + parts.host + "/page";
        } catch (const MalformedRequest&) {
            request.initiator_url = "https://first.example/";
        }
    } else {
        request.initiator_url = "https://visited-" + std::to_string(pick(500)) + ".example/";
    }
    return request;
}

Request WorkloadGenerator::random_request() {
    Request request;
    request.url = random_url();
    request.initiator_url = "https://visited-" + std::to_string(pick(500)) + ".example/";
    request.resource_type = resource_type_from_token(kTypes[pick(8)]);
    return request;
}

RequestLog WorkloadGenerator::log(const RuleSet& set, size_t count, double blockable_fraction,
                                  int32_t start_day, size_t requests_per_day) {
    std::vector<uint32_t> network;
    for (uint32_t ordinal : set.matchable()) {
        if (set.rule(ordinal).kind == RuleKind::Network) network.push_back(ordinal);
    }
    if (requests_per_day == 0) requests_per_day = count;
    RequestLog out;
    for (size_t i = 0; i < count; ++i) {
        LogRecord record;
        record.day = start_day + static_cast<int32_t>(i / requests_per_day);
        if (!network.empty() && chance(blockable_fraction)) {
            record.request = matching_request(set.rule(network[pick(network.size())]));
        } else {
            record.request = random_request();
        }
        record.page_url = record.request.initiator_url;
        record.request.timestamp =
            record.day * 86400.0 + static_cast<double>(i % requests_per_day);
        out.records.push_back(std::move(record));
    }
    return out;
}

}  // namespace adkit
