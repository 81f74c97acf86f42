#pragma once

#include <filesystem>
#include <string>

#include "liftpde/dpp.hpp"
#include "liftpde/game.hpp"
#include "liftpde/verify.hpp"

namespace liftpde {

// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

// Writes via a temporary file in the target directory followed by an atomic
// rename, so readers never observe a partial artifact.
void atomic_write_file(const std::filesystem::path& path, const std::string& contents);

// node_id,x_1..x_n,label,value over interior and strip nodes, ascending id.
std::string field_to_csv(const ValueField& field);

// eps,h,core_sup_error,iters,residual,wall_ms
std::string sweep_to_csv(const SweepReport& report);

// One JSON object per line: seed identity, s0, tau, censoring, payoff, move
// counts, and step records (first/last 100 unless the trajectory kept all).
std::string trajectory_to_jsonl_line(const Trajectory& trajectory, GameMode mode);

}  // namespace liftpde
