#ifndef ADKIT_FILTER_RULE_HPP_
#define ADKIT_FILTER_RULE_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace adkit {

enum class RuleKind {
    Network,
    Exception,
    Element,
    ElementException,
    Comment,
    Unsupported,
};

const char* to_string(RuleKind kind);

enum class Anchor {
    None,
    StartOfUrl,      // leading "|"
    DomainBoundary,  // leading "||"
};

enum class PartType {
    Literal,
    Wildcard,   // "*"
    Separator,  // "^"
};

struct PatternPart {
    PartType type = PartType::Literal;
    std::string text;    // Literal only, as written
    std::string folded;  // Literal only, ASCII-lowercased
};

struct PatternSpec {
    Anchor anchor = Anchor::None;
    bool end_anchored = false;
    std::vector<PatternPart> parts;
    bool match_case = false;
};

// Resource types a rule option or a logged request can name.
enum class ResourceType : uint16_t {
    Script,
    Image,
    Stylesheet,
    Object,
    Subdocument,
    Document,
    XmlHttpRequest,
    WebSocket,
    Font,
    Media,
    Ping,
    Other,
    MainDocument,  // requests only, never a rule option
};

constexpr int kNumRuleResourceTypes = 12;  // excludes MainDocument

const char* to_string(ResourceType type);
// Unknown tokens map to Other (logs are lossy).
ResourceType resource_type_from_token(const std::string& token);

enum class PartyFilter {
    Any,
    ThirdOnly,  // $third-party
    FirstOnly,  // $~third-party
};

struct RuleOptions {
    // Include-only and exclude sets are mutually exclusive; a bit set in
    // `type_mask` means the rule applies to that type.
    uint16_t include_types = 0;
    uint16_t exclude_types = 0;
    PartyFilter party = PartyFilter::Any;
    std::vector<std::string> domains_include;
    std::vector<std::string> domains_exclude;
    std::vector<std::string> unknown_options;

    bool has_type_filter() const { return include_types != 0 || exclude_types != 0; }
};

uint16_t type_bit(ResourceType type);

struct FilterRule {
    std::string raw;  // original line, verbatim
    RuleKind kind = RuleKind::Comment;
    PatternSpec pattern;  // meaningful iff kind in {Network, Exception}
    RuleOptions options;  // same
    std::string id;       // canonical text: raw after trimming

    bool is_matchable() const {
        return kind == RuleKind::Network || kind == RuleKind::Exception;
    }
};

struct ParseStats {
    size_t total = 0;
    size_t network = 0;
    size_t exception = 0;
    size_t element = 0;
    size_t element_exception = 0;
    size_t comment = 0;
    size_t unsupported = 0;
};

// Parses one list line. Total: never fails, unparseable bodies come back
// as RuleKind::Unsupported with the offending fragment in unknown_options.
FilterRule parse_rule(const std::string& line);

struct ParsedList {
    std::vector<FilterRule> rules;
    ParseStats stats;
};

ParsedList parse_list(const std::string& text);
ParsedList parse_list_file(const std::string& path);

}  // namespace adkit

#endif  // ADKIT_FILTER_RULE_HPP_
