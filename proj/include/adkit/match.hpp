#ifndef ADKIT_MATCH_HPP_
#define ADKIT_MATCH_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "adkit/filter_rule.hpp"
#include "adkit/suffix_table.hpp"
#include "adkit/url.hpp"

namespace adkit {

struct Request {
    std::string url;
    std::string initiator_url;
    ResourceType resource_type = ResourceType::Other;
    double timestamp = 0;  // seconds since epoch
    std::optional<std::string> content_hash;
    std::optional<uint64_t> content_size;
};

enum class DecisionStatus {
    Blocked,
    Excepted,
    Allowed,
};

const char* to_string(DecisionStatus status);

struct Decision {
    DecisionStatus status = DecisionStatus::Allowed;
    std::optional<std::string> network_rule;    // canonical rule text
    std::optional<std::string> exception_rule;  // canonical rule text
    bool heuristic_allowed = false;
};

// Per-request state shared across many match_rule calls.
struct PreparedRequest {
    const Request* request = nullptr;
    std::string folded_url;
    UrlParts url_parts;
    std::string initiator_host;       // folded; empty if opaque/missing
    std::string url_etld1;
    std::string initiator_etld1;

    static PreparedRequest prepare(const Request& request, const SuffixTable& suffixes);
};

// Pattern + options match of one Network/Exception rule against a request.
bool match_rule(const FilterRule& rule, const Request& request, const SuffixTable& suffixes);
bool match_prepared(const FilterRule& rule, const PreparedRequest& prepared);

}  // namespace adkit

#endif  // ADKIT_MATCH_HPP_
