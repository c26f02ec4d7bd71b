#ifndef ADKIT_WORKLOAD_HPP_
#define ADKIT_WORKLOAD_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "adkit/index.hpp"
#include "adkit/replay.hpp"

namespace adkit {

// Seeded generators for synthetic lists and request logs. Everything here
// is deterministic for a fixed seed.
class WorkloadGenerator {
  public:
    explicit WorkloadGenerator(uint64_t seed);

    // `export_safe` restricts options to what the content-blocker format
    // can express exactly (whole resource-type groups, one domain-list
    // polarity).
    std::vector<std::string> rule_lines(size_t count, double exception_fraction = 0.15,
                                        bool export_safe = false);

    // A URL that match_rule accepts for this rule; the request's type,
    // initiator and party are arranged to satisfy the rule's options.
    Request matching_request(const FilterRule& rule);

    Request random_request();

    // `blockable_fraction` of the records get URLs synthesized from random
    // network rules of `set` (a lower bound on what actually matches).
    RequestLog log(const RuleSet& set, size_t count, double blockable_fraction,
                   int32_t start_day = 17000, size_t requests_per_day = 0);

    std::string random_url();
    std::string token();

  private:
    std::mt19937_64 rng_;
    std::vector<std::string> pool_;
    size_t pick(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng_); }
    bool chance(double p) { return std::uniform_real_distribution<>(0, 1)(rng_) < p; }
    std::string host();
    std::string rule_body(bool export_safe);
};

}  // namespace adkit

#endif  // ADKIT_WORKLOAD_HPP_
