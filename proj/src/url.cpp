#include "adkit/url.hpp"

#include <algorithm>
#include <cctype>

namespace adkit {

namespace {
char lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}
}  // namespace

std::string ascii_fold(const std::string& s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), lower);
    return out;
}

UrlParts parse_url(const std::string& url) {
    UrlParts parts;
    size_t colon = url.find(':');
    if (colon == std::string::npos || colon == 0)
        throw MalformedRequest("missing scheme: " + url);
    for (size_t i = 0; i < colon; ++i) {
        char c = url[i];
        bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
        if (!ok || (i == 0 && !std::isalpha(static_cast<unsigned char>(c))))
            throw MalformedRequest("bad scheme: " + url);
    }
    parts.scheme = ascii_fold(url.substr(0, colon));
    if (url.compare(colon, 3, "://") != 0) {
        parts.hierarchical = false;
        return parts;  // opaque (data:, about:, mailto:)
    }
    parts.hierarchical = true;
    size_t begin = colon + 3;
    size_t end = url.find_first_of("/?#", begin);
    if (end == std::string::npos) end = url.size();
    size_t at = url.rfind('@', end);
    if (at != std::string::npos && at >= begin) begin = at + 1;
    size_t port = url.find(':', begin);
    size_t host_end = (port != std::string::npos && port < end) ? port : end;
    if (host_end == begin) throw MalformedRequest("empty host: " + url);
    parts.host_begin = begin;
    parts.host_end = host_end;
    parts.host = ascii_fold(url.substr(begin, host_end - begin));
    return parts;
}

bool is_web_scheme(const std::string& scheme) {
    return scheme == "http" || scheme == "https" || scheme == "ws" || scheme == "wss";
}

std::vector<std::string> url_tokens(const std::string& folded_url) {
    std::vector<std::string> tokens;
    size_t i = 0;
    const size_t n = folded_url.size();
    auto is_token_char = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '%';
    };
    while (i < n) {
        while (i < n && !is_token_char(folded_url[i])) ++i;
        size_t start = i;
        while (i < n && is_token_char(folded_url[i])) ++i;
        if (i - start >= 3) tokens.push_back(folded_url.substr(start, i - start));
    }
    return tokens;
}

}  // namespace adkit
