#ifndef ADKIT_INDEX_HPP_
#define ADKIT_INDEX_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "adkit/filter_rule.hpp"
#include "adkit/match.hpp"

namespace adkit {

// Parsed list with stable ordinals; shared between indexes.
class RuleSet {
  public:
    RuleSet() = default;
    explicit RuleSet(std::vector<FilterRule> rules);

    const FilterRule& rule(uint32_t ordinal) const { return rules_[ordinal]; }
    size_t size() const { return rules_.size(); }
    const std::vector<FilterRule>& rules() const { return rules_; }

    // Ordinals of all Network/Exception rules, in list order.
    const std::vector<uint32_t>& matchable() const { return matchable_; }

    // First rule whose canonical text equals `id`; SIZE_MAX if absent.
    uint32_t ordinal_of(const std::string& id) const;

  private:
    std::vector<FilterRule> rules_;
    std::vector<uint32_t> matchable_;
    std::unordered_map<std::string, uint32_t> by_id_;
};

// Token-bucket index over a subset of a RuleSet. Each member rule lives in
// exactly one bucket (its lowest-frequency eligible token) or in the
// fallback list, which is scanned for every request.
class RuleIndex {
  public:
    RuleIndex() = default;

    static RuleIndex build(std::shared_ptr<const RuleSet> set,
                           const std::vector<uint32_t>& members);
    static RuleIndex build_all(std::shared_ptr<const RuleSet> set);

    void insert(uint32_t ordinal);
    bool remove(uint32_t ordinal);  // true when the ordinal was a member
    bool contains(uint32_t ordinal) const { return token_of_.count(ordinal) > 0; }
    size_t size() const { return token_of_.size(); }
    const RuleSet& rule_set() const { return *set_; }
    size_t bucket_count() const { return buckets_.size(); }
    size_t fallback_size() const { return fallback_.size(); }

    // Ordinals of member rules that could match the URL (superset of the
    // true match set), sorted by ordinal.
    std::vector<uint32_t> candidates(const std::string& folded_url) const;

    Decision decide(const Request& request, const SuffixTable& suffixes) const;
    Decision decide_prepared(const PreparedRequest& prepared) const;

  private:
    std::shared_ptr<const RuleSet> set_;
    std::unordered_map<std::string, std::vector<uint32_t>> buckets_;
    std::vector<uint32_t> fallback_;
    std::unordered_map<uint32_t, std::string> token_of_;  // "" = fallback
};

// Tokens a rule may be indexed under: runs of [a-z0-9%] of length >= 3 in
// its literals whose boundaries cannot fall inside a URL token.
std::vector<std::string> index_tokens(const PatternSpec& spec);

// Linear scan over every Network/Exception rule in list order. Reference
// path for the index; also drives the bench subcommand.
Decision decide_brute(const RuleSet& set, const Request& request, const SuffixTable& suffixes);

}  // namespace adkit

#endif  // ADKIT_INDEX_HPP_
