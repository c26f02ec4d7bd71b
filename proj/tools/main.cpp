#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "adkit/analytics.hpp"
#include "adkit/index.hpp"
#include "adkit/ios_export.hpp"
#include "adkit/replay.hpp"
#include "adkit/strategy.hpp"
#include "adkit/workload.hpp"

namespace {

using namespace adkit;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path);
    return out;
}

SuffixTable load_suffixes(const std::string& path) {
    return path.empty() ? SuffixTable() : SuffixTable::load_file(path);
}

int cmd_inspect(const std::string& list_path) {
    ParsedList parsed = parse_list_file(list_path);
    const ParseStats& s = parsed.stats;
    double n = s.total ? static_cast<double>(s.total) : 1.0;
    char buf[128];
    std::printf("total %zu\n", s.total);
    auto row = [&](const char* name, size_t count) {
        std::snprintf(buf, sizeof buf, "%-18s %8zu  %6.2f%%\n", name, count, 100.0 * count / n);
        std::fputs(buf, stdout);
    };
    row("network", s.network);
    row("exception", s.exception);
    row("element", s.element);
    row("element-exception", s.element_exception);
    row("comment", s.comment);
    row("unsupported", s.unsupported);
    return 0;
}

StrategyConfig make_config(const std::string& list_path, const std::string& mode,
                           const std::string& hot_path) {
    StrategyConfig config;
    config.mode = strategy_mode_from_token(mode);
    config.full_rules = std::make_shared<RuleSet>(parse_list_file(list_path).rules);
    if (config.mode != StrategyMode::FullSync) {
        if (hot_path.empty())
            throw std::runtime_error("--hot is required for mode " + mode);
        config.hot_rule_ids = load_hot_ids(hot_path);
    }
    return config;
}

int cmd_replay(const std::string& log_path, const std::string& list_path,
               const std::string& mode, const std::string& hot_path,
               const std::string& suffix_path, const std::string& report_path,
               std::string timing_path, const std::string& promotions_path) {
    SuffixTable suffixes = load_suffixes(suffix_path);
    Strategy strategy(make_config(list_path, mode, hot_path), suffixes);
    RequestLog log = load_log(log_path);
    ReplayReport report = replay(log, strategy, suffixes);

    auto out = open_out(report_path);
    write_report(report, out);
    if (timing_path.empty()) timing_path = report_path + ".timing";
    auto timing = open_out(timing_path);
    write_timing(report, timing);
    if (!promotions_path.empty()) {
        auto promotions = open_out(promotions_path);
        for (const auto& p : strategy.promotions_log()) promotions << p.rule_id << '\n';
    }
    return 0;
}

int cmd_profile(const std::string& log_path, const std::string& list_path,
                const std::string& suffix_path, const std::string& out_path) {
    SuffixTable suffixes = load_suffixes(suffix_path);
    StrategyConfig config;
    config.mode = StrategyMode::FullSync;
    config.full_rules = std::make_shared<RuleSet>(parse_list_file(list_path).rules);
    Strategy strategy(config, suffixes);
    RequestLog log = load_log(log_path);
    ReplayOptions options;
    options.measure_timing = false;
    ReplayReport report = replay(log, strategy, suffixes, options);
    auto out = open_out(out_path);
    write_profile(report.rule_usage, out);
    return 0;
}

int cmd_reduce(const std::string& list_path, const std::string& profile_path,
               uint64_t min_count, const std::string& out_path) {
    ParsedList parsed = parse_list_file(list_path);
    UsageProfile profile = load_profile(profile_path);
    std::vector<FilterRule> reduced = reduce_list(parsed.rules, profile, min_count);
    if (reduced.empty())
        std::cerr << "warning: no rule reached min-count " << min_count << "\n";
    auto out = open_out(out_path);
    for (const auto& rule : reduced) out << rule.id << '\n';

    RuleSet set(parsed.rules);
    UsageSummary summary = usage_summary(profile, set);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "kept %zu of %zu network+exception rules (used fraction %.4f)\n",
                  reduced.size(), summary.total_rules, summary.used_fraction);
    std::fputs(buf, stdout);
    return 0;
}

int cmd_snapshots(const std::string& dir, const std::string& out_path) {
    SnapshotSeries series = load_snapshot_dir(dir);
    SnapshotDiff diff = diff_snapshots(series);
    auto out = open_out(out_path);
    out << "[sizes]\n";
    for (const auto& [day, size] : diff.sizes) out << format_date(day) << ' ' << size << '\n';
    out << "[insertions]\n";
    for (const auto& [day, count] : diff.insertions)
        out << format_date(day) << ' ' << count << '\n';
    out << "[removals]\n";
    for (const auto& [day, count] : diff.removals)
        out << format_date(day) << ' ' << count << '\n';
    out << "[lifetime-cdf]\n";
    try {
        for (const auto& point : lifetime_cdf(diff.lifetimes)) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.0f %.6f\n", point.value, point.cumulative);
            out << buf;
        }
    } catch (const EmptyInput&) {
        out << "# no removed rules\n";
    }
    return 0;
}

std::vector<double> load_numbers(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sample file: " + path);
    std::vector<double> values;
    double v;
    while (in >> v) values.push_back(v);
    return values;
}

int cmd_ks(const std::string& a_path, const std::string& b_path) {
    KsResult result = ks_two_sample(load_numbers(a_path), load_numbers(b_path));
    char buf[80];
    std::snprintf(buf, sizeof buf, "D=%.12f\np=%.6g\n", result.statistic, result.p_value);
    std::fputs(buf, stdout);
    return 0;
}

int cmd_evasions(const std::string& dir, const std::vector<std::string>& log_paths,
                 const std::string& suffix_path, const std::string& out_path) {
    SnapshotSeries series = load_snapshot_dir(dir);
    std::vector<RequestLog> logs;
    for (const auto& path : log_paths) logs.push_back(load_log(path));
    SuffixTable suffixes = load_suffixes(suffix_path);
    std::vector<EvasionCandidate> candidates = detect_evasions(series, logs, suffixes);
    auto out = open_out(out_path);
    out << "# rate convention: distinct URLs per log day, addition day excluded;\n"
        << "# a candidate needs a strict rate increase after the rule was added\n";
    for (const auto& c : candidates) {
        out << c.content_hash << ' ' << to_string(c.hint) << ' ' << format_date(c.rule_added)
            << ' ' << c.urls_before.size() << ' ' << c.urls_after.size() << ' ' << c.rule_id
            << '\n';
    }
    std::printf("candidates %zu\n", candidates.size());
    return 0;
}

int cmd_export_ios(const std::string& list_path, const std::string& out_path, size_t max_rules,
                   bool truncate, const std::string& report_path) {
    ParsedList parsed = parse_list_file(list_path);
    ExportOptions options;
    options.max_rules = max_rules;
    options.truncate = truncate;
    IosExport result = export_ios(parsed.rules, options);
    auto out = open_out(out_path);
    out << result.document.dump(2) << '\n';
    if (!report_path.empty()) {
        auto report = open_out(report_path);
        report << "exported=" << result.report.exported_count << '\n';
        report << "limit=" << result.report.limit << '\n';
        report << "truncated=" << (result.report.truncated ? 1 : 0) << '\n';
        report << "# separator atoms translate to an alternation group; some\n"
                  "# content-blocker dialects may not accept it\n";
        for (const auto& skipped : result.report.skipped)
            report << "skipped " << skipped.reason << ": " << skipped.rule_id << '\n';
    }
    std::printf("exported %zu, skipped %zu\n", result.report.exported_count,
                result.report.skipped.size());
    return 0;
}

int cmd_bench(size_t num_rules, size_t num_requests, uint64_t seed) {
    WorkloadGenerator generator(seed);
    std::string list_text;
    for (const auto& line : generator.rule_lines(num_rules)) list_text += line + "\n";
    auto set = std::make_shared<RuleSet>(parse_list(list_text).rules);
    SuffixTable suffixes;
    RequestLog log = generator.log(*set, num_requests, 0.3);
    RuleIndex index = RuleIndex::build_all(set);

    using clock = std::chrono::steady_clock;
    size_t indexed_blocked = 0, brute_blocked = 0;
    auto t0 = clock::now();
    for (const auto& record : log.records) {
        if (index.decide(record.request, suffixes).status == DecisionStatus::Blocked)
            ++indexed_blocked;
    }
    auto t1 = clock::now();
    for (const auto& record : log.records) {
        if (decide_brute(*set, record.request, suffixes).status == DecisionStatus::Blocked)
            ++brute_blocked;
    }
    auto t2 = clock::now();
    double indexed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    double brute_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
    if (indexed_blocked != brute_blocked) {
        std::fprintf(stderr, "mismatch: indexed blocked %zu vs brute %zu\n", indexed_blocked,
                     brute_blocked);
        return 1;
    }
    std::printf("rules=%zu requests=%zu blocked=%zu\n", num_rules, num_requests,
                indexed_blocked);
    std::printf("indexed_total_ms=%.2f brute_total_ms=%.2f speedup=%.2fx\n", indexed_ms,
                brute_ms, brute_ms / indexed_ms);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EasyList-style filter engine: parse, replay, analyze, export"};
    app.require_subcommand(1);
    std::string suffix_path;
    uint64_t seed = 20190214;
    bool quiet = false;
    app.add_option("--suffixes", suffix_path, "public-suffix table file")->capture_default_str();
    app.add_option("--seed", seed, "seed for generated workloads")->capture_default_str();
    app.add_flag("--quiet", quiet, "suppress warnings");

    std::string list_path, log_path, out_path, report_path, timing_path, hot_path,
        profile_path, dir_path, promotions_path, a_path, b_path;
    std::string mode = "full";
    uint64_t min_count = 1;
    size_t max_rules = 50000;
    bool truncate = false;
    size_t bench_rules = 35000, bench_requests = 100000;
    std::vector<std::string> log_paths;

    auto* inspect = app.add_subcommand("inspect", "classify a filter list");
    inspect->add_option("--list", list_path)->required();

    auto* replay_cmd = app.add_subcommand("replay", "replay a request log through a strategy");
    replay_cmd->add_option("--log", log_path)->required();
    replay_cmd->add_option("--list", list_path)->required();
    replay_cmd->add_option("--mode", mode)->check(CLI::IsMember({"full", "reduced", "hybrid"}));
    replay_cmd->add_option("--hot", hot_path, "hot-set file (one rule text per line)");
    replay_cmd->add_option("--report", report_path)->required();
    replay_cmd->add_option("--timing", timing_path, "timing output (default REPORT.timing)");
    replay_cmd->add_option("--promotions", promotions_path, "write promoted rule ids");

    auto* profile_cmd = app.add_subcommand("profile", "emit a usage profile from a replay");
    profile_cmd->add_option("--log", log_path)->required();
    profile_cmd->add_option("--list", list_path)->required();
    profile_cmd->add_option("--out", out_path)->required();

    auto* reduce_cmd = app.add_subcommand("reduce", "keep rules used at least min-count times");
    reduce_cmd->add_option("--list", list_path)->required();
    reduce_cmd->add_option("--profile", profile_path)->required();
    reduce_cmd->add_option("--min-count", min_count)->capture_default_str();
    reduce_cmd->add_option("--out", out_path)->required();

    auto* snapshots_cmd = app.add_subcommand("snapshots", "diff a dated snapshot directory");
    snapshots_cmd->add_option("--dir", dir_path)->required();
    snapshots_cmd->add_option("--out", out_path)->required();

    auto* ks_cmd = app.add_subcommand("ks", "two-sample Kolmogorov-Smirnov test");
    ks_cmd->add_option("--a", a_path)->required();
    ks_cmd->add_option("--b", b_path)->required();

    auto* evasions_cmd = app.add_subcommand("evasions", "detect URL-churn evasion candidates");
    evasions_cmd->add_option("--dir", dir_path)->required();
    evasions_cmd->add_option("--logs", log_paths, "per-day request logs")->required();
    evasions_cmd->add_option("--out", out_path)->required();

    auto* export_cmd = app.add_subcommand("export-ios", "convert to content-blocker JSON");
    export_cmd->add_option("--list", list_path)->required();
    export_cmd->add_option("--out", out_path)->required();
    export_cmd->add_option("--max", max_rules)->capture_default_str();
    export_cmd->add_flag("--truncate", truncate);
    export_cmd->add_option("--report", report_path);

    auto* bench_cmd = app.add_subcommand("bench", "indexed vs brute-force matcher timing");
    bench_cmd->add_option("--rules", bench_rules)->capture_default_str();
    bench_cmd->add_option("--requests", bench_requests)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*inspect) return cmd_inspect(list_path);
        if (*replay_cmd)
            return cmd_replay(log_path, list_path, mode, hot_path, suffix_path, report_path,
                              timing_path, promotions_path);
        if (*profile_cmd) return cmd_profile(log_path, list_path, suffix_path, out_path);
        if (*reduce_cmd) return cmd_reduce(list_path, profile_path, min_count, out_path);
        if (*snapshots_cmd) return cmd_snapshots(dir_path, out_path);
        if (*ks_cmd) return cmd_ks(a_path, b_path);
        if (*evasions_cmd) return cmd_evasions(dir_path, log_paths, suffix_path, out_path);
        if (*export_cmd)
            return cmd_export_ios(list_path, out_path, max_rules, truncate, report_path);
        if (*bench_cmd) return cmd_bench(bench_rules, bench_requests, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
