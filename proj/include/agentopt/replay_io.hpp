#pragma once

#include <string>

#include "agentopt/evaluator.hpp"

namespace agentopt::evalsub {

inline constexpr const char* kReplayCsvHeader =
    "combo_index,datapoint_index,score,cost_usd,latency_s,input_tokens,output_tokens";

// Loads a complete replay matrix. Throws IncompleteMatrix when the row
// count is not n_combos * n_datapoints, DuplicateCell on repeated cells,
// IndexOutOfRange on bad indices, IoError when unreadable. Scores outside
// [0, 1] are clamped; the clamp count is reported via *clamped when given.
ReplayMatrix load_replay_csv(const std::string& path, std::int64_t n_combos,
                             std::int64_t n_datapoints, std::int64_t* clamped = nullptr);

// Writes the matrix in (combo, datapoint) order, one row per cell.
void save_replay_csv(const ReplayMatrix& matrix, const std::string& path);

}  // namespace agentopt::evalsub
