#ifndef ADKIT_SUFFIX_TABLE_HPP_
#define ADKIT_SUFFIX_TABLE_HPP_

#include <string>
#include <unordered_set>

namespace adkit {

// Public-suffix set backing eTLD+1 extraction. The built-in table covers
// generic TLDs plus a small multi-label set; load_file() replaces it with a
// full public-suffix dump when configured.
class SuffixTable {
  public:
    SuffixTable();  // built-in minimal table
    static SuffixTable load_file(const std::string& path);

    bool contains(const std::string& suffix) const { return suffixes_.count(suffix) > 0; }
    size_t size() const { return suffixes_.size(); }
    void insert(const std::string& suffix) { suffixes_.insert(suffix); }

    // Longest matching public suffix plus one preceding label. No suffix
    // matches: the last two labels. A bare single label: the host itself.
    std::string etld_plus_one(const std::string& host) const;

  private:
    std::unordered_set<std::string> suffixes_;
};

}  // namespace adkit

#endif  // ADKIT_SUFFIX_TABLE_HPP_
