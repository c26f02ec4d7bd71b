#include "adkit/strategy.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <unordered_set>

namespace adkit {

const char* to_string(StrategyMode mode) {
    switch (mode) {
        case StrategyMode::FullSync: return "full";
        case StrategyMode::ReducedSync: return "reduced";
        case StrategyMode::Hybrid: return "hybrid";
    }
    return "?";
}

StrategyMode strategy_mode_from_token(const std::string& token) {
    if (token == "full") return StrategyMode::FullSync;
    if (token == "reduced") return StrategyMode::ReducedSync;
    if (token == "hybrid") return StrategyMode::Hybrid;
    throw std::runtime_error("unknown strategy mode: " + token);
}

std::vector<std::string> load_hot_ids(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open hot-set file: " + path);
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '!') continue;
        ids.push_back(line);
    }
    return ids;
}

StrategyConfig load_strategy_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open strategy manifest: " + path);
    StrategyConfig config;
    std::string line, list_path, hot_path;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("bad manifest line: " + line);
        std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        if (key == "mode") config.mode = strategy_mode_from_token(value);
        else if (key == "list") list_path = value;
        else if (key == "hot") hot_path = value;
        else throw std::runtime_error("unknown manifest key: " + key);
    }
    if (list_path.empty()) throw std::runtime_error("manifest missing list=");
    config.full_rules = std::make_shared<RuleSet>(parse_list_file(list_path).rules);
    if (config.mode != StrategyMode::FullSync) {
        if (hot_path.empty()) throw std::runtime_error("manifest missing hot=");
        config.hot_rule_ids = load_hot_ids(hot_path);
    }
    return config;
}

Strategy::Strategy(const StrategyConfig& config, const SuffixTable& suffixes)
    : mode_(config.mode), set_(config.full_rules), suffixes_(suffixes) {
    if (!set_) throw std::runtime_error("strategy config has no rule set");
    if (mode_ == StrategyMode::FullSync) {
        sync_index_ = RuleIndex::build_all(set_);
    } else {
        std::unordered_set<uint32_t> hot;
        for (const auto& id : config.hot_rule_ids) {
            uint32_t ordinal = set_->ordinal_of(id);
            if (ordinal == UINT32_MAX)
                throw std::runtime_error("hot rule not in full list: " + id);
            if (set_->rule(ordinal).is_matchable()) hot.insert(ordinal);
        }
        std::vector<uint32_t> hot_members, cold_members;
        for (uint32_t ordinal : set_->matchable()) {
            (hot.count(ordinal) ? hot_members : cold_members).push_back(ordinal);
        }
        sync_index_ = RuleIndex::build(set_, hot_members);
        if (mode_ == StrategyMode::Hybrid)
            async_index_ = RuleIndex::build(set_, cold_members);
    }
    hot_size_start_ = sync_index_.size();
}

Decision Strategy::decide_sync(const Request& request) const {
    if (request.resource_type == ResourceType::MainDocument) {
        Decision d;
        d.status = DecisionStatus::Allowed;
        d.heuristic_allowed = true;
        return d;
    }
    PreparedRequest prepared = PreparedRequest::prepare(request, suffixes_);
    std::shared_lock lock(mutex_);
    return sync_index_.decide_prepared(prepared);
}

AsyncOutcome Strategy::evaluate_async(const Request& request, const Decision& sync_decision) {
    AsyncOutcome outcome;
    if (mode_ != StrategyMode::Hybrid) return outcome;
    if (sync_decision.status != DecisionStatus::Allowed || sync_decision.heuristic_allowed)
        return outcome;
    PreparedRequest prepared = PreparedRequest::prepare(request, suffixes_);
    Decision cold;
    {
        std::shared_lock lock(mutex_);
        cold = async_index_.decide_prepared(prepared);
    }
    if (cold.network_rule) {
        promote(set_->ordinal_of(*cold.network_rule), request);
        if (cold.exception_rule) promote(set_->ordinal_of(*cold.exception_rule), request);
        std::unique_lock lock(mutex_);
        ++late_blocks_;
        outcome.kind = AsyncOutcomeKind::LateBlock;
        outcome.rule_id = cold.network_rule;
        return outcome;
    }
    if (cold.exception_rule) {
        // Changes no decision on its own; counted but not promoted.
        std::unique_lock lock(mutex_);
        ++late_exceptions_;
        outcome.kind = AsyncOutcomeKind::LateException;
        outcome.rule_id = cold.exception_rule;
        return outcome;
    }
    return outcome;
}

bool Strategy::promote(uint32_t ordinal, const Request& request) {
    std::unique_lock lock(mutex_);
    if (sync_index_.contains(ordinal)) return false;  // lost the race, no-op
    async_index_.remove(ordinal);
    sync_index_.insert(ordinal);
    promotions_.push_back({set_->rule(ordinal).id, request.url, request.timestamp});
    return true;
}

StrategyCounters Strategy::snapshot_counters() const {
    std::shared_lock lock(mutex_);
    StrategyCounters c;
    c.hot_size_start = hot_size_start_;
    c.hot_size_end = sync_index_.size();
    c.cold_size = mode_ == StrategyMode::Hybrid ? async_index_.size() : 0;
    c.late_blocks = late_blocks_;
    c.late_exceptions = late_exceptions_;
    c.promotions = promotions_.size();
    return c;
}

std::vector<Promotion> Strategy::promotions_log() const {
    std::shared_lock lock(mutex_);
    return promotions_;
}

}  // namespace adkit
