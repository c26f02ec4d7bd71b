#ifndef ADKIT_URL_HPP_
#define ADKIT_URL_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace adkit {

// Raised when a logged URL cannot be parsed; signals bad log data rather
// than a non-match.
class MalformedRequest : public std::runtime_error {
  public:
    explicit MalformedRequest(const std::string& what) : std::runtime_error(what) {}
};

struct UrlParts {
    std::string scheme;  // lowercased, no trailing ':'
    std::string host;    // lowercased, no port, no userinfo; empty for opaque URLs
    size_t host_begin = 0;  // offsets into the original URL text
    size_t host_end = 0;
    bool hierarchical = false;  // had "://"
};

// Minimal URL splitter. Throws MalformedRequest when no scheme is present
// or a hierarchical URL lacks a host.
UrlParts parse_url(const std::string& url);

bool is_web_scheme(const std::string& scheme);  // http, https, ws, wss

std::string ascii_fold(const std::string& s);

// Maximal runs of [a-z0-9%] with length >= 3 over the folded text.
std::vector<std::string> url_tokens(const std::string& folded_url);

// True for characters the "^" pattern atom does NOT match.
inline bool is_url_word_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-' || c == '.' || c == '%';
}

}  // namespace adkit

#endif  // ADKIT_URL_HPP_
