#include "agentopt/replay_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace agentopt::evalsub {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::int64_t parse_int(const std::string& s, const char* what, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        std::int64_t v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
    }
}

double parse_double(const std::string& s, const char* what, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
    }
}

}  // namespace

ReplayMatrix load_replay_csv(const std::string& path, std::int64_t n_combos,
                             std::int64_t n_datapoints, std::int64_t* clamped) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open replay file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw IoError("replay file '" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kReplayCsvHeader)
        throw IoError("replay file header mismatch; expected '" + std::string(kReplayCsvHeader) + "'");

    ReplayMatrix matrix;
    matrix.n_combos = n_combos;
    matrix.n_datapoints = n_datapoints;
    matrix.cells.resize(static_cast<std::size_t>(n_combos * n_datapoints));
    std::vector<bool> seen(matrix.cells.size(), false);

    std::int64_t clamp_count = 0;
    std::size_t line_no = 1;
    std::int64_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv(line);
        if (fields.size() != 7)
            throw IoError("line " + std::to_string(line_no) + ": expected 7 fields, got " +
                          std::to_string(fields.size()));
        std::int64_t combo = parse_int(fields[0], "combo_index", line_no);
        std::int64_t datapoint = parse_int(fields[1], "datapoint_index", line_no);
        if (combo < 0 || combo >= n_combos || datapoint < 0 || datapoint >= n_datapoints)
            throw IndexOutOfRange("line " + std::to_string(line_no) + ": cell (" +
                                  std::to_string(combo) + ", " + std::to_string(datapoint) +
                                  ") outside " + std::to_string(n_combos) + "x" +
                                  std::to_string(n_datapoints));
        std::size_t idx = static_cast<std::size_t>(combo * n_datapoints + datapoint);
        if (seen[idx])
            throw DuplicateCell("line " + std::to_string(line_no) + ": duplicate cell (" +
                                std::to_string(combo) + ", " + std::to_string(datapoint) + ")");
        seen[idx] = true;

        Observation obs;
        obs.score = parse_double(fields[2], "score", line_no);
        if (obs.score < 0.0 || obs.score > 1.0) {
            obs.score = std::clamp(obs.score, 0.0, 1.0);
            ++clamp_count;
        }
        obs.cost = Money::parse_usd(fields[3]);
        obs.latency_s = parse_double(fields[4], "latency_s", line_no);
        obs.input_tokens = parse_int(fields[5], "input_tokens", line_no);
        obs.output_tokens = parse_int(fields[6], "output_tokens", line_no);
        matrix.cells[idx] = obs;
        ++rows;
    }

    if (rows != n_combos * n_datapoints)
        throw IncompleteMatrix("replay file has " + std::to_string(rows) + " rows, expected " +
                               std::to_string(n_combos * n_datapoints));
    if (clamped) *clamped = clamp_count;
    return matrix;
}

void save_replay_csv(const ReplayMatrix& matrix, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write replay file '" + path + "'");
    out << kReplayCsvHeader << "\n";
    char buf[160];
    for (std::int64_t c = 0; c < matrix.n_combos; ++c) {
        for (std::int64_t d = 0; d < matrix.n_datapoints; ++d) {
            const Observation& obs = matrix.at(c, d);
            std::snprintf(buf, sizeof(buf), "%lld,%lld,%.6f,%s,%.6f,%lld,%lld\n",
                          static_cast<long long>(c), static_cast<long long>(d), obs.score,
                          obs.cost.to_string().c_str(), obs.latency_s,
                          static_cast<long long>(obs.input_tokens),
                          static_cast<long long>(obs.output_tokens));
            out << buf;
        }
    }
    if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace agentopt::evalsub
