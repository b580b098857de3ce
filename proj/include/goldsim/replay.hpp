#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "goldsim/config.hpp"

namespace goldsim {

enum class ReplayVerdict { Match, DigestMismatch, Malformed };

std::string_view to_string(ReplayVerdict v);

struct ReplayReport {
  ReplayVerdict verdict{ReplayVerdict::Malformed};
  std::string embedded_digest;  // from the run_end record
  std::string file_digest;      // recomputed over the file's lines
  std::string rerun_digest;     // from re-running the embedded config
  std::string message;
};

// Digest over every line except the final run_end record.
std::string file_digest(const std::vector<std::string>& lines);
std::vector<std::string> read_lines(const std::string& path);

// Checks file integrity, then re-runs the embedded config and seed.
ReplayReport replay_lines(const std::vector<std::string>& lines);
ReplayReport replay(const std::string& log_path);

struct DivergentEvent {
  std::size_t line{0};
  std::string left;   // empty when the left log has ended
  std::string right;
};

struct LogDiff {
  std::size_t left_events{0};
  std::size_t right_events{0};
  std::optional<std::size_t> first_divergence;  // line index
  std::vector<DivergentEvent> samples;           // first divergent lines, bounded
  // "source/kind" -> (left count, right count), only where the counts differ.
  std::map<std::string, std::pair<std::size_t, std::size_t>> kind_counts;
};

LogDiff diff_logs(const std::vector<std::string>& left, const std::vector<std::string>& right,
                  std::size_t max_samples = 20);

}  // namespace goldsim
