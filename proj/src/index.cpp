#include "adkit/index.hpp"

#include <algorithm>

namespace adkit {

RuleSet::RuleSet(std::vector<FilterRule> rules) : rules_(std::move(rules)) {
    for (uint32_t i = 0; i < rules_.size(); ++i) {
        if (rules_[i].is_matchable()) matchable_.push_back(i);
        by_id_.emplace(rules_[i].id, i);  // keeps the first occurrence
    }
}

uint32_t RuleSet::ordinal_of(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? UINT32_MAX : it->second;
}

std::vector<std::string> index_tokens(const PatternSpec& spec) {
    // Boundary-annotated folded pattern: '|' marks a position a URL token
    // cannot cross, '*' a position it might. A run is eligible only when
    // both neighbours are hard boundaries, so the run always shows up as a
    // complete token of any matching URL.
    std::string s;
    s.push_back(spec.anchor == Anchor::None ? '*' : '|');
    for (const auto& part : spec.parts) {
        switch (part.type) {
            case PartType::Literal: s += part.folded; break;
            case PartType::Wildcard: s.push_back('*'); break;
            case PartType::Separator: s.push_back('|'); break;
        }
    }
    s.push_back(spec.end_anchored ? '|' : '*');

    auto is_token_char = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '%';
    };
    std::vector<std::string> tokens;
    size_t i = 1;
    while (i + 1 < s.size()) {
        if (!is_token_char(s[i])) { ++i; continue; }
        size_t start = i;
        while (i < s.size() && is_token_char(s[i])) ++i;
        if (i - start >= 3 && s[start - 1] != '*' && i < s.size() && s[i] != '*')
            tokens.push_back(s.substr(start, i - start));
    }
    return tokens;
}

RuleIndex RuleIndex::build(std::shared_ptr<const RuleSet> set,
                           const std::vector<uint32_t>& members) {
    RuleIndex index;
    index.set_ = std::move(set);
    for (uint32_t ordinal : members) {
        if (index.set_->rule(ordinal).is_matchable()) index.insert(ordinal);
    }
    return index;
}

RuleIndex RuleIndex::build_all(std::shared_ptr<const RuleSet> set) {
    const std::vector<uint32_t>& members = set->matchable();
    return build(std::move(set), members);
}

void RuleIndex::insert(uint32_t ordinal) {
    if (token_of_.count(ordinal)) return;
    const FilterRule& rule = set_->rule(ordinal);
    if (!rule.is_matchable()) return;
    std::vector<std::string> tokens = index_tokens(rule.pattern);
    if (tokens.empty()) {
        fallback_.push_back(ordinal);
        token_of_.emplace(ordinal, "");
        return;
    }
    // Lowest bucket frequency at insertion time; ties prefer the longest,
    // then lexicographically smallest token.
    const std::string* best = nullptr;
    size_t best_count = SIZE_MAX;
    for (const auto& token : tokens) {
        auto it = buckets_.find(token);
        size_t count = it == buckets_.end() ? 0 : it->second.size();
        if (count < best_count ||
            (count == best_count &&
             (token.size() > best->size() ||
              (token.size() == best->size() && token < *best)))) {
            best_count = count;
            best = &token;
        }
    }
    buckets_[*best].push_back(ordinal);
    token_of_.emplace(ordinal, *best);
}

bool RuleIndex::remove(uint32_t ordinal) {
    auto it = token_of_.find(ordinal);
    if (it == token_of_.end()) return false;
    std::vector<uint32_t>& vec = it->second.empty() ? fallback_ : buckets_[it->second];
    vec.erase(std::find(vec.begin(), vec.end(), ordinal));
    token_of_.erase(it);
    return true;
}

std::vector<uint32_t> RuleIndex::candidates(const std::string& folded_url) const {
    std::vector<uint32_t> out(fallback_);
    std::vector<std::string> tokens = url_tokens(folded_url);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (const auto& token : tokens) {
        auto it = buckets_.find(token);
        if (it != buckets_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

Decision heuristic_allow() {
    Decision d;
    d.status = DecisionStatus::Allowed;
    d.heuristic_allowed = true;
    return d;
}

Decision from_matches(const RuleSet& set, uint32_t network, uint32_t exception) {
    Decision d;
    if (network != UINT32_MAX) d.network_rule = set.rule(network).id;
    if (exception != UINT32_MAX) d.exception_rule = set.rule(exception).id;
    if (network != UINT32_MAX)
        d.status = exception != UINT32_MAX ? DecisionStatus::Excepted : DecisionStatus::Blocked;
    else
        d.status = DecisionStatus::Allowed;
    return d;
}

}  // namespace

Decision RuleIndex::decide_prepared(const PreparedRequest& prepared) const {
    if (!is_web_scheme(prepared.url_parts.scheme)) return heuristic_allow();
    uint32_t network = UINT32_MAX, exception = UINT32_MAX;
    for (uint32_t ordinal : candidates(prepared.folded_url)) {
        const FilterRule& rule = set_->rule(ordinal);
        if (rule.kind == RuleKind::Exception) {
            if (exception == UINT32_MAX && match_prepared(rule, prepared)) exception = ordinal;
        } else {
            if (network == UINT32_MAX && match_prepared(rule, prepared)) network = ordinal;
        }
        if (network != UINT32_MAX && exception != UINT32_MAX) break;
    }
    return from_matches(*set_, network, exception);
}

Decision RuleIndex::decide(const Request& request, const SuffixTable& suffixes) const {
    if (request.resource_type == ResourceType::MainDocument) return heuristic_allow();
    PreparedRequest prepared = PreparedRequest::prepare(request, suffixes);
    return decide_prepared(prepared);
}

Decision decide_brute(const RuleSet& set, const Request& request, const SuffixTable& suffixes) {
    if (request.resource_type == ResourceType::MainDocument) return heuristic_allow();
    PreparedRequest prepared = PreparedRequest::prepare(request, suffixes);
    if (!is_web_scheme(prepared.url_parts.scheme)) return heuristic_allow();
    uint32_t network = UINT32_MAX, exception = UINT32_MAX;
    for (uint32_t ordinal : set.matchable()) {
        const FilterRule& rule = set.rule(ordinal);
        if (rule.kind == RuleKind::Exception) {
            if (exception == UINT32_MAX && match_prepared(rule, prepared)) exception = ordinal;
        } else {
            if (network == UINT32_MAX && match_prepared(rule, prepared)) network = ordinal;
        }
        if (network != UINT32_MAX && exception != UINT32_MAX) break;
    }
    return from_matches(set, network, exception);
}

}  // namespace adkit
