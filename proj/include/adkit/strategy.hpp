#ifndef ADKIT_STRATEGY_HPP_
#define ADKIT_STRATEGY_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "adkit/index.hpp"

namespace adkit {

enum class StrategyMode {
    FullSync,     // every network/exception rule applied synchronously
    ReducedSync,  // only the hot set, nothing else
    Hybrid,       // hot set sync, cold tail async with promotion
};

const char* to_string(StrategyMode mode);
StrategyMode strategy_mode_from_token(const std::string& token);

struct StrategyConfig {
    StrategyMode mode = StrategyMode::FullSync;
    std::shared_ptr<const RuleSet> full_rules;
    std::vector<std::string> hot_rule_ids;  // ignored for FullSync
};

// Manifest file: "mode=...", "list=PATH", "hot=PATH" lines.
StrategyConfig load_strategy_manifest(const std::string& path);
std::vector<std::string> load_hot_ids(const std::string& path);

struct Promotion {
    std::string rule_id;
    std::string request_url;
    double timestamp = 0;
};

enum class AsyncOutcomeKind { None, LateBlock, LateException };

struct AsyncOutcome {
    AsyncOutcomeKind kind = AsyncOutcomeKind::None;
    std::optional<std::string> rule_id;
};

struct StrategyCounters {
    size_t hot_size_start = 0;
    size_t hot_size_end = 0;
    size_t cold_size = 0;
    size_t late_blocks = 0;
    size_t late_exceptions = 0;
    size_t promotions = 0;
};

// One list-application strategy instance. decide_sync never blocks on the
// async side; promotion takes the writer lock, so a concurrent sync
// decision sees either the pre- or post-promotion hot set.
class Strategy {
  public:
    explicit Strategy(const StrategyConfig& config, const SuffixTable& suffixes);

    StrategyMode mode() const { return mode_; }
    const RuleSet& rules() const { return *set_; }

    // The verdict that governs whether the request is issued.
    Decision decide_sync(const Request& request) const;

    // Hybrid only; call after decide_sync returned Allowed. Evaluates the
    // cold tail, counts late events, and promotes matching cold rules.
    AsyncOutcome evaluate_async(const Request& request, const Decision& sync_decision);

    // Moves a cold rule into the hot set. Returns false when the rule is
    // already hot (concurrent async evaluations race benignly).
    bool promote(uint32_t ordinal, const Request& request);

    StrategyCounters snapshot_counters() const;
    std::vector<Promotion> promotions_log() const;

  private:
    StrategyMode mode_;
    std::shared_ptr<const RuleSet> set_;
    const SuffixTable& suffixes_;
    mutable std::shared_mutex mutex_;
    RuleIndex sync_index_;
    RuleIndex async_index_;  // cold set; Hybrid only
    std::vector<Promotion> promotions_;
    size_t hot_size_start_ = 0;
    size_t late_blocks_ = 0;
    size_t late_exceptions_ = 0;
};

}  // namespace adkit

#endif  // ADKIT_STRATEGY_HPP_
