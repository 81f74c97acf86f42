#include "liftpde/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

namespace liftpde {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void atomic_write_file(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  fs::create_directories(dir);
  const fs::path tmp = dir / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string field_to_csv(const ValueField& field) {
  const GridDomain& grid = *field.grid;
  std::string out = "node_id";
  for (int i = 0; i < grid.dim(); ++i) out += ",x_" + std::to_string(i + 1);
  out += ",label,value\n";
  for (NodeId id = 0; id < grid.num_nodes(); ++id) {
    const NodeLabel lab = grid.label(id);
    if (lab == NodeLabel::exterior) continue;
    out += std::to_string(id);
    const Eigen::VectorXd x = grid.coords(id);
    for (int i = 0; i < grid.dim(); ++i) {
      out += ',';
      out += format_double(x[i]);
    }
    out += ',';
    out += label_name(lab);
    out += ',';
    out += format_double(field.values[id]);
    out += '\n';
  }
  return out;
}

std::string sweep_to_csv(const SweepReport& report) {
  std::string out = "eps,h,core_sup_error,iters,residual,wall_ms\n";
  for (const SweepRow& r : report.rows) {
    out += format_double(r.eps);
    out += ',';
    out += format_double(r.h);
    out += ',';
    out += format_double(r.core_error);
    out += ',';
    out += std::to_string(r.iterations);
    out += ',';
    out += format_double(r.residual);
    out += ',';
    out += format_double(r.wall_ms);
    out += '\n';
  }
  return out;
}

std::string trajectory_to_jsonl_line(const Trajectory& tr, GameMode mode) {
  nlohmann::ordered_json j;
  j["master_seed"] = tr.master_seed;
  j["stream"] = tr.stream;
  j["s0"] = tr.s0;
  j["tau"] = tr.tau;
  j["censored"] = tr.censored;
  j["payoff"] = tr.payoff;
  j["score_delta"] = tr.score_delta;
  j["moves"] = {{"noise", tr.moves_noise}, {"player_one", tr.moves_one}, {"player_two", tr.moves_two}};
  j["states_truncated"] =
      tr.tau > static_cast<std::int64_t>(tr.head.size() + tr.tail.size());

  const auto dump_steps = [&](const std::vector<StepRecord>& steps) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const StepRecord& s : steps) {
      nlohmann::ordered_json one;
      one["type"] = s.type == MoveType::noise ? "noise"
                    : s.type == MoveType::player_one ? "player_one" : "player_two";
      if (mode == GameMode::lattice) {
        one["node"] = s.node;
      } else {
        one["pos"] = std::vector<double>(s.pos.data(), s.pos.data() + s.pos.size());
      }
      one["score_change"] = s.score_change;
      arr.push_back(std::move(one));
    }
    return arr;
  };
  j["states"] = dump_steps(tr.head);
  if (!tr.tail.empty()) j["states_tail"] = dump_steps(tr.tail);
  j["end_node"] = tr.end_node;
  j["end_pos"] = std::vector<double>(tr.end_pos.data(), tr.end_pos.data() + tr.end_pos.size());
  return j.dump();
}

}  // namespace liftpde
