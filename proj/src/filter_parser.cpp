#include "adkit/filter_rule.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace adkit {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n\f\v");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(b, e - b + 1);
}

char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string fold(const std::string& s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
    return out;
}

bool is_comment_line(const std::string& t) {
    if (t.empty()) return true;
    if (t[0] == '!') return true;
    if (t.front() == '[' && t.back() == ']') return true;
    return false;
}

// "##" / "#@#" outside the option section marks a cosmetic rule. The option
// section starts at the last '$' that is followed by option-looking text;
// cosmetic markers never appear after it in practice, so a plain search over
// the part before the last '$' suffices.
bool find_element_marker(const std::string& t, bool& exception) {
    size_t end = t.size();
    size_t at = t.find("#@#");
    if (at != std::string::npos && at < end) {
        exception = true;
        return true;
    }
    at = t.find("##");
    if (at != std::string::npos && at < end) {
        exception = false;
        return true;
    }
    return false;
}

const std::unordered_map<std::string, ResourceType>& type_token_map() {
    static const std::unordered_map<std::string, ResourceType> map = {
        {"script", ResourceType::Script},
        {"image", ResourceType::Image},
        {"stylesheet", ResourceType::Stylesheet},
        {"object", ResourceType::Object},
        {"subdocument", ResourceType::Subdocument},
        {"document", ResourceType::Document},
        {"xmlhttprequest", ResourceType::XmlHttpRequest},
        {"websocket", ResourceType::WebSocket},
        {"font", ResourceType::Font},
        {"media", ResourceType::Media},
        {"ping", ResourceType::Ping},
        {"other", ResourceType::Other},
    };
    return map;
}

// Splits "body$options" at the last '$'. A '$' inside the pattern body is
// possible but rare; EasyList convention puts options after the last one.
void split_options(const std::string& body, std::string& pattern, std::string& options) {
    size_t pos = body.rfind('$');
    if (pos == std::string::npos) {
        pattern = body;
        options.clear();
    } else {
        pattern = body.substr(0, pos);
        options = body.substr(pos + 1);
    }
}

// Returns false when the option list contains something outside the
// supported subset; the offending tokens land in opts.unknown_options.
bool parse_options(const std::string& text, RuleOptions& opts, bool& match_case) {
    std::stringstream ss(text);
    std::string token;
    bool ok = true;
    while (std::getline(ss, token, ',')) {
        std::string t = fold(trim(token));
        if (t.empty()) continue;
        if (t == "match-case") {
            match_case = true;
            continue;
        }
        if (t == "third-party") {
            opts.party = PartyFilter::ThirdOnly;
            continue;
        }
        if (t == "~third-party") {
            opts.party = PartyFilter::FirstOnly;
            continue;
        }
        if (t.rfind("domain=", 0) == 0) {
            std::stringstream ds(t.substr(7));
            std::string d;
            while (std::getline(ds, d, '|')) {
                if (d.empty()) continue;
                if (d[0] == '~')
                    opts.domains_exclude.push_back(d.substr(1));
                else
                    opts.domains_include.push_back(d);
            }
            continue;
        }
        bool negated = !t.empty() && t[0] == '~';
        std::string name = negated ? t.substr(1) : t;
        auto it = type_token_map().find(name);
        if (it != type_token_map().end()) {
            if (negated)
                opts.exclude_types |= type_bit(it->second);
            else
                opts.include_types |= type_bit(it->second);
            continue;
        }
        opts.unknown_options.push_back(t);
        ok = false;
    }
    // Mixing include and exclude polarity has no agreed semantics.
    if (opts.include_types != 0 && opts.exclude_types != 0) {
        opts.unknown_options.push_back("mixed-type-polarity");
        ok = false;
    }
    return ok;
}

// Returns false when the body cannot be expressed as anchor + parts.
bool parse_pattern(const std::string& body, PatternSpec& spec) {
    std::string p = body;
    // Regex rules ("/.../") are out of the supported grammar.
    if (p.size() >= 2 && p.front() == '/' && p.back() == '/') return false;
    if (p.rfind("||", 0) == 0) {
        spec.anchor = Anchor::DomainBoundary;
        p = p.substr(2);
    } else if (!p.empty() && p[0] == '|') {
        spec.anchor = Anchor::StartOfUrl;
        p = p.substr(1);
    }
    if (!p.empty() && p.back() == '|') {
        spec.end_anchored = true;
        p.pop_back();
    }
    std::string lit;
    auto flush = [&] {
        if (lit.empty()) return;
        PatternPart part;
        part.type = PartType::Literal;
        part.text = lit;
        part.folded = fold(lit);
        spec.parts.push_back(std::move(part));
        lit.clear();
    };
    for (char c : p) {
        if (c == '*') {
            flush();
            if (!spec.parts.empty() && spec.parts.back().type == PartType::Wildcard) continue;
            spec.parts.push_back({PartType::Wildcard, "", ""});
        } else if (c == '^') {
            flush();
            spec.parts.push_back({PartType::Separator, "", ""});
        } else {
            lit.push_back(c);
        }
    }
    flush();
    // Leading/trailing '*' never changes what matches.
    if (spec.anchor == Anchor::None && !spec.parts.empty() &&
        spec.parts.front().type == PartType::Wildcard) {
        spec.parts.erase(spec.parts.begin());
    }
    if (!spec.end_anchored && !spec.parts.empty() &&
        spec.parts.back().type == PartType::Wildcard) {
        spec.parts.pop_back();
    }
    if (spec.anchor == Anchor::DomainBoundary &&
        (spec.parts.empty() || spec.parts.front().type != PartType::Literal)) {
        return false;
    }
    return true;
}

}  // namespace

const char* to_string(RuleKind kind) {
    switch (kind) {
        case RuleKind::Network: return "network";
        case RuleKind::Exception: return "exception";
        case RuleKind::Element: return "element";
        case RuleKind::ElementException: return "element-exception";
        case RuleKind::Comment: return "comment";
        case RuleKind::Unsupported: return "unsupported";
    }
    return "?";
}

const char* to_string(ResourceType type) {
    switch (type) {
        case ResourceType::Script: return "script";
        case ResourceType::Image: return "image";
        case ResourceType::Stylesheet: return "stylesheet";
        case ResourceType::Object: return "object";
        case ResourceType::Subdocument: return "subdocument";
        case ResourceType::Document: return "document";
        case ResourceType::XmlHttpRequest: return "xmlhttprequest";
        case ResourceType::WebSocket: return "websocket";
        case ResourceType::Font: return "font";
        case ResourceType::Media: return "media";
        case ResourceType::Ping: return "ping";
        case ResourceType::Other: return "other";
        case ResourceType::MainDocument: return "main_document";
    }
    return "?";
}

ResourceType resource_type_from_token(const std::string& token) {
    std::string t = fold(token);
    if (t == "main_document" || t == "main_frame") return ResourceType::MainDocument;
    auto it = type_token_map().find(t);
    return it == type_token_map().end() ? ResourceType::Other : it->second;
}

uint16_t type_bit(ResourceType type) {
    return static_cast<uint16_t>(1u << static_cast<uint16_t>(type));
}

FilterRule parse_rule(const std::string& line) {
    FilterRule rule;
    rule.raw = line;
    std::string t = trim(line);
    rule.id = t;

    if (is_comment_line(t)) {
        rule.kind = RuleKind::Comment;
        return rule;
    }
    bool elem_exception = false;
    if (find_element_marker(t, elem_exception)) {
        rule.kind = elem_exception ? RuleKind::ElementException : RuleKind::Element;
        return rule;
    }

    std::string body = t;
    bool exception = false;
    if (body.rfind("@@", 0) == 0) {
        exception = true;
        body = body.substr(2);
    }

    std::string pattern_text, option_text;
    split_options(body, pattern_text, option_text);

    bool ok = parse_options(option_text, rule.options, rule.pattern.match_case);
    ok = parse_pattern(pattern_text, rule.pattern) && ok;
    if (!ok) {
        if (rule.options.unknown_options.empty())
            rule.options.unknown_options.push_back(pattern_text);
        rule.kind = RuleKind::Unsupported;
        return rule;
    }
    rule.kind = exception ? RuleKind::Exception : RuleKind::Network;
    return rule;
}

ParsedList parse_list(const std::string& text) {
    ParsedList out;
    size_t start = 0;
    while (start <= text.size()) {
        size_t nl = text.find('\n', start);
        std::string line;
        if (nl == std::string::npos) {
            if (start == text.size()) break;
            line = text.substr(start);
            start = text.size() + 1;
        } else {
            line = text.substr(start, nl - start);
            start = nl + 1;
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        FilterRule rule = parse_rule(line);
        out.stats.total++;
        switch (rule.kind) {
            case RuleKind::Network: out.stats.network++; break;
            case RuleKind::Exception: out.stats.exception++; break;
            case RuleKind::Element: out.stats.element++; break;
            case RuleKind::ElementException: out.stats.element_exception++; break;
            case RuleKind::Comment: out.stats.comment++; break;
            case RuleKind::Unsupported: out.stats.unsupported++; break;
        }
        out.rules.push_back(std::move(rule));
    }
    return out;
}

ParsedList parse_list_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open filter list: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_list(ss.str());
}

}  // namespace adkit
