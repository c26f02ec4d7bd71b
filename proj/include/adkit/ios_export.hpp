#ifndef ADKIT_IOS_EXPORT_HPP_
#define ADKIT_IOS_EXPORT_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "adkit/index.hpp"
#include "adkit/match.hpp"
#include "adkit/suffix_table.hpp"

#include <json.hpp>

namespace adkit {

class RuleLimitExceeded : public std::runtime_error {
  public:
    explicit RuleLimitExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct SkippedRule {
    std::string rule_id;
    std::string reason;
};

struct ExportReport {
    size_t exported_count = 0;
    std::vector<SkippedRule> skipped;
    size_t limit = 50000;
    bool truncated = false;
};

struct ExportOptions {
    size_t max_rules = 50000;
    bool truncate = false;
};

struct IosExport {
    nlohmann::ordered_json document;  // JSON array of trigger/action entries
    ExportReport report;
    std::vector<std::string> exported_rule_ids;  // source rule per entry, in order
};

// Network rules become "block" entries, exception rules
// "ignore-previous-rules" entries placed after all blocks. Rules whose
// semantics the declarative format cannot express exactly are skipped with
// a reason, never approximated.
IosExport export_ios(const std::vector<FilterRule>& rules, const ExportOptions& options = {});

struct ExportMismatch {
    std::string url;
    DecisionStatus engine_status;
    DecisionStatus document_status;
};

// Semantic-preservation check: replays the corpus through the source rules
// (skipped rules excluded) and through the exported document, returning
// every disagreement.
std::vector<ExportMismatch> verify_export(const std::vector<FilterRule>& rules,
                                          const IosExport& exported,
                                          const std::vector<Request>& corpus,
                                          const SuffixTable& suffixes);

// Evaluates the exported entries in order against one request.
DecisionStatus evaluate_document(const nlohmann::ordered_json& document,
                                 const Request& request, const SuffixTable& suffixes);

}  // namespace adkit

#endif  // ADKIT_IOS_EXPORT_HPP_
