#include "adkit/suffix_table.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

#include "adkit/url.hpp"

namespace adkit {

namespace {
const char* kBuiltin[] = {
    "com", "net", "org", "io", "edu", "gov", "mil", "int", "biz", "info",
    "name", "mobi", "co", "me", "tv", "cc", "app", "dev", "news", "site",
    "uk", "de", "fr", "jp", "au", "us", "ca", "cn", "ru", "br", "in", "it",
    "nl", "es", "pl", "se", "ch", "kr",
    "example", "test", "invalid", "local",
    "co.uk", "ac.uk", "gov.uk", "org.uk",
    "co.jp", "ne.jp", "or.jp",
    "com.au", "net.au", "org.au",
    "com.br", "com.cn", "com.mx", "co.in", "co.kr", "co.za", "com.tr",
};
}  // namespace

SuffixTable::SuffixTable() {
    for (const char* s : kBuiltin) suffixes_.insert(s);
}

SuffixTable SuffixTable::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open suffix table: " + path);
    SuffixTable table;
    table.suffixes_.clear();
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        size_t e = line.find_last_not_of(" \t");
        std::string s = line.substr(b, e - b + 1);
        if (s.empty() || s[0] == '#') continue;
        table.suffixes_.insert(ascii_fold(s));
    }
    if (table.suffixes_.empty())
        throw std::runtime_error("suffix table is empty: " + path);
    return table;
}

std::string SuffixTable::etld_plus_one(const std::string& host) const {
    std::vector<size_t> label_starts;
    label_starts.push_back(0);
    for (size_t i = 0; i < host.size(); ++i)
        if (host[i] == '.') label_starts.push_back(i + 1);
    size_t n = label_starts.size();
    if (n <= 1) return host;
    // label_starts[i] begins the candidate suffix with n-i labels.
    for (size_t i = 1; i < n; ++i) {
        if (contains(host.substr(label_starts[i]))) {
            return host.substr(label_starts[i - 1]);
        }
    }
    // Whole host is itself a registered suffix.
    if (contains(host)) return host;
    return host.substr(label_starts[n - 2]);
}

}  // namespace adkit
