#include "agentopt/report.hpp"

#include <cstdio>
#include <fstream>

namespace agentopt::report {

namespace {

std::string fixed6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

bool needs_quotes(const std::string& s) {
    if (s.empty()) return true;
    for (char c : s) {
        bool plain = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                     c == '-' || c == '_' || c == '.';
        if (!plain) return true;
    }
    return false;
}

std::string yaml_scalar(const std::string& s) {
    if (!needs_quotes(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string csv_field(const std::string& s) {
    bool quote = s.find_first_of(",\"\n") != std::string::npos;
    if (!quote) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace

SavingsSummary savings(const selectors::SelectionReport& report,
                       const BruteForceReference& reference) {
    if (reference.evaluations <= 0 && !reference.total_cost)
        throw MissingReference("brute-force reference has neither evaluations nor cost");
    SavingsSummary summary;
    summary.selector_evaluations = report.total_evaluations;
    summary.brute_force_evaluations = reference.evaluations;
    if (reference.total_cost && reference.total_cost->pico() > 0) {
        summary.savings_fraction = 1.0 - static_cast<double>(report.total_cost.pico()) /
                                             static_cast<double>(reference.total_cost->pico());
    } else {
        if (reference.evaluations <= 0)
            throw MissingReference("brute-force reference evaluation count missing");
        summary.savings_fraction = 1.0 - static_cast<double>(report.total_evaluations) /
                                             static_cast<double>(reference.evaluations);
    }
    return summary;
}

std::string format_percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", fraction * 100.0);
    return buf;
}

std::string render_csv(const selectors::SelectionReport& report) {
    std::string out = "rank,combo_index";
    for (const auto& role : report.role_names) out += "," + csv_field(role);
    out += ",mean_score,n_evals,mean_latency_s,total_cost_usd,on_pareto\n";
    int rank = 1;
    for (const auto& e : report.ranked) {
        out += std::to_string(rank++) + "," + std::to_string(e.combo_index);
        for (const auto& model : e.models) out += "," + csv_field(model);
        out += "," + fixed6(e.mean_score);
        out += "," + std::to_string(e.n);
        out += "," + fixed6(e.mean_latency_s);
        out += "," + e.total_cost.to_string();
        out += e.on_pareto ? ",1\n" : ",0\n";
    }
    return out;
}

void export_csv(const selectors::SelectionReport& report, const std::string& path) {
    write_file(path, render_csv(report));
}

std::string render_config_yaml(const selectors::SelectionReport& report) {
    const selectors::RankedEntry* best = report.entry(report.best_combo);
    if (report.best_combo < 0 || !best) throw NoBestCombination();
    std::string out;
    out += "selector: " + yaml_scalar(report.selector_name) + "\n";
    out += "seed: " + std::to_string(report.seed) + "\n";
    out += "mean_score: " + fixed6(best->mean_score) + "\n";
    out += "roles:\n";
    for (std::size_t r = 0; r < report.role_names.size(); ++r)
        out += "  " + yaml_scalar(report.role_names[r]) + ": " + yaml_scalar(best->models[r]) + "\n";
    return out;
}

void export_config_yaml(const selectors::SelectionReport& report, const std::string& path) {
    write_file(path, render_config_yaml(report));
}

}  // namespace agentopt::report
