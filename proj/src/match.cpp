#include "adkit/match.hpp"

#include <cassert>
#include <span>

namespace adkit {

const char* to_string(DecisionStatus status) {
    switch (status) {
        case DecisionStatus::Blocked: return "blocked";
        case DecisionStatus::Excepted: return "excepted";
        case DecisionStatus::Allowed: return "allowed";
    }
    return "?";
}

PreparedRequest PreparedRequest::prepare(const Request& request, const SuffixTable& suffixes) {
    PreparedRequest p;
    p.request = &request;
    p.url_parts = parse_url(request.url);
    p.folded_url = ascii_fold(request.url);
    if (!p.url_parts.host.empty()) p.url_etld1 = suffixes.etld_plus_one(p.url_parts.host);
    if (!request.initiator_url.empty()) {
        try {
            UrlParts init = parse_url(request.initiator_url);
            p.initiator_host = init.host;
            if (!init.host.empty()) p.initiator_etld1 = suffixes.etld_plus_one(init.host);
        } catch (const MalformedRequest&) {
            // Initiator stays empty; party/domain options then treat the
            // request as third-party with no initiator host.
        }
    }
    return p;
}

namespace {

bool host_within(const std::string& host, const std::string& domain) {
    if (host.size() < domain.size()) return false;
    if (host.compare(host.size() - domain.size(), domain.size(), domain) != 0) return false;
    if (host.size() == domain.size()) return true;
    return host[host.size() - domain.size() - 1] == '.';
}

bool options_apply(const FilterRule& rule, const PreparedRequest& p) {
    const RuleOptions& opts = rule.options;
    ResourceType type = p.request->resource_type;
    if (type != ResourceType::MainDocument) {
        uint16_t bit = type_bit(type);
        if (opts.include_types != 0 && (opts.include_types & bit) == 0) return false;
        if (opts.exclude_types != 0 && (opts.exclude_types & bit) != 0) return false;
    } else if (opts.include_types != 0) {
        return false;  // main_document is never one of the option types
    }
    if (opts.party != PartyFilter::Any) {
        bool third = p.initiator_etld1.empty() || p.url_etld1 != p.initiator_etld1;
        if (opts.party == PartyFilter::ThirdOnly && !third) return false;
        if (opts.party == PartyFilter::FirstOnly && third) return false;
    }
    if (!opts.domains_include.empty()) {
        bool hit = false;
        for (const auto& d : opts.domains_include)
            if (host_within(p.initiator_host, d)) { hit = true; break; }
        if (!hit) return false;
    }
    for (const auto& d : opts.domains_exclude)
        if (host_within(p.initiator_host, d)) return false;
    return true;
}

struct TextView {
    const std::string* text;  // folded unless match_case
};

// Matches parts[pi..] starting at url[pos]; wildcards backtrack.
bool match_parts(std::span<const PatternPart> parts, size_t pi, const std::string& url,
                 size_t pos, bool end_anchored, bool folded) {
    if (pi == parts.size()) {
        return !end_anchored || pos == url.size();
    }
    const PatternPart& part = parts[pi];
    switch (part.type) {
        case PartType::Literal: {
            const std::string& lit = folded ? part.folded : part.text;
            if (url.compare(pos, lit.size(), lit) != 0) return false;
            return match_parts(parts, pi + 1, url, pos + lit.size(), end_anchored, folded);
        }
        case PartType::Separator: {
            if (pos == url.size()) {
                // "^" also matches the end of the URL (zero width).
                return match_parts(parts, pi + 1, url, pos, end_anchored, folded);
            }
            if (is_url_word_char(static_cast<unsigned char>(url[pos]))) return false;
            return match_parts(parts, pi + 1, url, pos + 1, end_anchored, folded);
        }
        case PartType::Wildcard: {
            for (size_t i = pos; i <= url.size(); ++i) {
                if (match_parts(parts, pi + 1, url, i, end_anchored, folded)) return true;
            }
            return false;
        }
    }
    return false;
}

bool pattern_matches(const PatternSpec& spec, const PreparedRequest& p) {
    bool folded = !spec.match_case;
    const std::string& url = folded ? p.folded_url : p.request->url;
    std::span<const PatternPart> parts(spec.parts);
    switch (spec.anchor) {
        case Anchor::StartOfUrl:
            return match_parts(parts, 0, url, 0, spec.end_anchored, folded);
        case Anchor::DomainBoundary: {
            // The literal may bind at the host start or after any "." in
            // the host; scheme and "://" are skipped implicitly.
            if (!p.url_parts.hierarchical) return false;
            size_t begin = p.url_parts.host_begin;
            size_t end = p.url_parts.host_end;
            if (match_parts(parts, 0, url, begin, spec.end_anchored, folded)) return true;
            for (size_t i = begin; i < end; ++i) {
                if (url[i] == '.' &&
                    match_parts(parts, 0, url, i + 1, spec.end_anchored, folded))
                    return true;
            }
            return false;
        }
        case Anchor::None: {
            if (parts.empty()) return true;  // empty pattern matches any URL
            // First part of an unanchored pattern is a Literal (leading
            // wildcards are stripped at parse time); seed start positions
            // from its occurrences.
            if (parts[0].type == PartType::Literal) {
                const std::string& lit = folded ? parts[0].folded : parts[0].text;
                size_t at = url.find(lit, 0);
                while (at != std::string::npos) {
                    if (match_parts(parts, 1, url, at + lit.size(), spec.end_anchored, folded))
                        return true;
                    at = url.find(lit, at + 1);
                }
                return false;
            }
            for (size_t i = 0; i <= url.size(); ++i) {
                if (match_parts(parts, 0, url, i, spec.end_anchored, folded)) return true;
            }
            return false;
        }
    }
    return false;
}

}  // namespace

bool match_prepared(const FilterRule& rule, const PreparedRequest& prepared) {
    assert(rule.is_matchable());
    if (!options_apply(rule, prepared)) return false;
    return pattern_matches(rule.pattern, prepared);
}

bool match_rule(const FilterRule& rule, const Request& request, const SuffixTable& suffixes) {
    PreparedRequest prepared = PreparedRequest::prepare(request, suffixes);
    return match_prepared(rule, prepared);
}

}  // namespace adkit
