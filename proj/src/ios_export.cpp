#include "adkit/ios_export.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <regex>
#include <unordered_set>

namespace adkit {

namespace {

struct IosTypeGroup {
    const char* ios_name;
    uint16_t engine_mask;
};

uint16_t bits(std::initializer_list<ResourceType> types) {
    uint16_t mask = 0;
    for (ResourceType t : types) mask |= type_bit(t);
    return mask;
}

const std::array<IosTypeGroup, 7>& ios_groups() {
    static const std::array<IosTypeGroup, 7> groups = {{
        {"document", bits({ResourceType::Document, ResourceType::Subdocument})},
        {"image", bits({ResourceType::Image})},
        {"style-sheet", bits({ResourceType::Stylesheet})},
        {"script", bits({ResourceType::Script})},
        {"font", bits({ResourceType::Font})},
        {"media", bits({ResourceType::Media})},
        {"raw", bits({ResourceType::Object, ResourceType::XmlHttpRequest,
                      ResourceType::WebSocket, ResourceType::Ping, ResourceType::Other})},
    }};
    return groups;
}

uint16_t all_rule_types() {
    uint16_t mask = 0;
    for (const auto& g : ios_groups()) mask |= g.engine_mask;
    return mask;
}

const char* ios_type_of(ResourceType type) {
    if (type == ResourceType::MainDocument) return "document";
    uint16_t bit = type_bit(type);
    for (const auto& g : ios_groups())
        if (g.engine_mask & bit) return g.ios_name;
    return "raw";
}

// Engine type mask -> iOS resource-type list; empty optional when the mask
// is not a union of whole groups (inexpressible, rule must be skipped).
std::optional<std::vector<std::string>> ios_type_list(uint16_t mask) {
    std::vector<std::string> out;
    for (const auto& g : ios_groups()) {
        uint16_t overlap = mask & g.engine_mask;
        if (overlap == 0) continue;
        if (overlap != g.engine_mask) return std::nullopt;
        out.emplace_back(g.ios_name);
    }
    return out;
}

void append_escaped_literal(std::string& regex, const std::string& literal) {
    for (char c : literal) {
        bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
        if (!alnum) regex.push_back('\\');
        regex.push_back(c);
    }
}

std::string pattern_to_regex(const PatternSpec& spec) {
    std::string regex;
    switch (spec.anchor) {
        case Anchor::StartOfUrl: regex += "^"; break;
        case Anchor::DomainBoundary: regex += "^[a-z][a-z0-9.+-]*://([^/]+\\.)?"; break;
        case Anchor::None: break;
    }
    for (const auto& part : spec.parts) {
        switch (part.type) {
            case PartType::Literal:
                append_escaped_literal(regex, spec.match_case ? part.text : part.folded);
                break;
            case PartType::Wildcard: regex += ".*"; break;
            case PartType::Separator: regex += "(?:[^a-zA-Z0-9_.%-]|$)"; break;
        }
    }
    if (spec.end_anchored) regex += "$";
    return regex;
}

struct Translated {
    nlohmann::ordered_json entry;
    std::string rule_id;
    bool is_exception = false;
};

std::optional<std::string> translate(const FilterRule& rule, Translated& out) {
    if (rule.kind == RuleKind::Unsupported) return "unsupported rule syntax";
    const RuleOptions& opts = rule.options;
    if (!opts.domains_include.empty() && !opts.domains_exclude.empty())
        return "mixed if-domain/unless-domain";

    uint16_t effective = opts.include_types != 0
                             ? opts.include_types
                             : static_cast<uint16_t>(all_rule_types() & ~opts.exclude_types);
    std::optional<std::vector<std::string>> types;
    if (effective != all_rule_types()) {
        types = ios_type_list(effective);
        if (!types) return "resource-type set not expressible";
    }

    nlohmann::ordered_json trigger;
    trigger["url-filter"] = pattern_to_regex(rule.pattern);
    trigger["url-filter-is-case-sensitive"] = rule.pattern.match_case;
    if (types) trigger["resource-type"] = *types;
    if (opts.party == PartyFilter::ThirdOnly)
        trigger["load-type"] = nlohmann::ordered_json::array({"third-party"});
    else if (opts.party == PartyFilter::FirstOnly)
        trigger["load-type"] = nlohmann::ordered_json::array({"first-party"});
    if (!opts.domains_include.empty()) {
        auto domains = nlohmann::ordered_json::array();
        for (const auto& d : opts.domains_include) domains.push_back("*" + d);
        trigger["if-domain"] = domains;
    }
    if (!opts.domains_exclude.empty()) {
        auto domains = nlohmann::ordered_json::array();
        for (const auto& d : opts.domains_exclude) domains.push_back("*" + d);
        trigger["unless-domain"] = domains;
    }

    out.is_exception = rule.kind == RuleKind::Exception;
    out.rule_id = rule.id;
    out.entry["trigger"] = std::move(trigger);
    out.entry["action"] = {{"type", out.is_exception ? "ignore-previous-rules" : "block"}};
    return std::nullopt;
}

}  // namespace

IosExport export_ios(const std::vector<FilterRule>& rules, const ExportOptions& options) {
    IosExport result;
    result.report.limit = options.max_rules;
    std::vector<Translated> blocks, ignores;
    for (const auto& rule : rules) {
        if (rule.kind != RuleKind::Network && rule.kind != RuleKind::Exception &&
            rule.kind != RuleKind::Unsupported)
            continue;
        Translated t;
        if (auto reason = translate(rule, t)) {
            result.report.skipped.push_back({rule.id, *reason});
            continue;
        }
        (t.is_exception ? ignores : blocks).push_back(std::move(t));
    }
    size_t translated = blocks.size() + ignores.size();
    if (translated > options.max_rules && !options.truncate) {
        throw RuleLimitExceeded("translated " + std::to_string(translated) +
                                " rules exceed the limit of " +
                                std::to_string(options.max_rules) +
                                "; reduce the list or pass --truncate");
    }

    result.document = nlohmann::ordered_json::array();
    auto emit = [&](std::vector<Translated>& list) {
        for (auto& t : list) {
            if (result.document.size() >= options.max_rules) {
                result.report.truncated = true;
                return;
            }
            result.document.push_back(std::move(t.entry));
            result.exported_rule_ids.push_back(std::move(t.rule_id));
        }
    };
    emit(blocks);
    if (!result.report.truncated) emit(ignores);
    result.report.exported_count = result.document.size();
    return result;
}

namespace {

struct CompiledEntry {
    std::regex pattern;
    bool is_block = true;
    std::optional<std::vector<std::string>> resource_types;
    std::optional<std::vector<std::string>> load_types;
    std::vector<std::string> if_domain;
    std::vector<std::string> unless_domain;
};

bool ios_domain_matches(const std::string& host, const std::string& entry) {
    if (!entry.empty() && entry[0] == '*') {
        std::string base = entry.substr(1);
        if (host == base) return true;
        return host.size() > base.size() &&
               host.compare(host.size() - base.size(), base.size(), base) == 0 &&
               host[host.size() - base.size() - 1] == '.';
    }
    return host == entry;
}

std::vector<CompiledEntry> compile_document(const nlohmann::ordered_json& document) {
    std::vector<CompiledEntry> compiled;
    for (const auto& entry : document) {
        CompiledEntry c;
        const auto& trigger = entry.at("trigger");
        auto flags = std::regex::ECMAScript;
        bool case_sensitive = trigger.value("url-filter-is-case-sensitive", false);
        if (!case_sensitive) flags |= std::regex::icase;
        c.pattern = std::regex(trigger.at("url-filter").get<std::string>(), flags);
        c.is_block = entry.at("action").at("type").get<std::string>() == "block";
        if (trigger.contains("resource-type"))
            c.resource_types = trigger["resource-type"].get<std::vector<std::string>>();
        if (trigger.contains("load-type"))
            c.load_types = trigger["load-type"].get<std::vector<std::string>>();
        if (trigger.contains("if-domain"))
            c.if_domain = trigger["if-domain"].get<std::vector<std::string>>();
        if (trigger.contains("unless-domain"))
            c.unless_domain = trigger["unless-domain"].get<std::vector<std::string>>();
        compiled.push_back(std::move(c));
    }
    return compiled;
}

DecisionStatus evaluate_compiled(const std::vector<CompiledEntry>& compiled,
                                 const Request& request, const SuffixTable& suffixes) {
    std::string initiator_host, url_etld1, initiator_etld1;
    try {
        UrlParts parts = parse_url(request.url);
        if (!parts.host.empty()) url_etld1 = suffixes.etld_plus_one(parts.host);
    } catch (const MalformedRequest&) {
    }
    if (!request.initiator_url.empty()) {
        try {
            UrlParts parts = parse_url(request.initiator_url);
            initiator_host = parts.host;
            if (!parts.host.empty()) initiator_etld1 = suffixes.etld_plus_one(parts.host);
        } catch (const MalformedRequest&) {
        }
    }
    bool third_party = initiator_etld1.empty() || url_etld1 != initiator_etld1;
    std::string ios_type = ios_type_of(request.resource_type);

    bool blocked = false, matched_block = false, matched_ignore = false;
    for (const auto& c : compiled) {
        if (c.resource_types &&
            std::find(c.resource_types->begin(), c.resource_types->end(), ios_type) ==
                c.resource_types->end())
            continue;
        if (c.load_types) {
            const char* want = third_party ? "third-party" : "first-party";
            if (std::find(c.load_types->begin(), c.load_types->end(), want) ==
                c.load_types->end())
                continue;
        }
        if (!c.if_domain.empty()) {
            bool hit = std::any_of(c.if_domain.begin(), c.if_domain.end(),
                                   [&](const std::string& d) {
                                       return ios_domain_matches(initiator_host, d);
                                   });
            if (!hit) continue;
        }
        if (!c.unless_domain.empty()) {
            bool hit = std::any_of(c.unless_domain.begin(), c.unless_domain.end(),
                                   [&](const std::string& d) {
                                       return ios_domain_matches(initiator_host, d);
                                   });
            if (hit) continue;
        }
        if (!std::regex_search(request.url, c.pattern)) continue;
        if (c.is_block) {
            blocked = true;
            matched_block = true;
        } else {
            blocked = false;
            matched_ignore = true;
        }
    }
    if (blocked) return DecisionStatus::Blocked;
    if (matched_block && matched_ignore) return DecisionStatus::Excepted;
    return DecisionStatus::Allowed;
}

}  // namespace

DecisionStatus evaluate_document(const nlohmann::ordered_json& document,
                                 const Request& request, const SuffixTable& suffixes) {
    return evaluate_compiled(compile_document(document), request, suffixes);
}

std::vector<ExportMismatch> verify_export(const std::vector<FilterRule>& rules,
                                          const IosExport& exported,
                                          const std::vector<Request>& corpus,
                                          const SuffixTable& suffixes) {
    std::unordered_set<std::string> exported_ids(exported.exported_rule_ids.begin(),
                                                 exported.exported_rule_ids.end());
    std::vector<FilterRule> kept;
    for (const auto& rule : rules) {
        if (rule.is_matchable() && exported_ids.count(rule.id)) kept.push_back(rule);
    }
    RuleSet kept_set(std::move(kept));
    std::vector<CompiledEntry> compiled = compile_document(exported.document);

    std::vector<ExportMismatch> mismatches;
    for (const auto& request : corpus) {
        Decision engine;
        try {
            engine = decide_brute(kept_set, request, suffixes);
        } catch (const MalformedRequest&) {
            continue;
        }
        if (engine.heuristic_allowed) continue;  // outside the declarative format's scope
        DecisionStatus document_status = evaluate_compiled(compiled, request, suffixes);
        if (engine.status != document_status) {
            mismatches.push_back({request.url, engine.status, document_status});
        }
    }
    return mismatches;
}

}  // namespace adkit
