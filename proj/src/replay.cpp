#include "goldsim/replay.hpp"

#include <fstream>

#include "goldsim/simulation.hpp"

namespace goldsim {

using nlohmann::ordered_json;

std::string_view to_string(ReplayVerdict v) {
  switch (v) {
    case ReplayVerdict::Match: return "Match";
    case ReplayVerdict::DigestMismatch: return "DigestMismatch";
    case ReplayVerdict::Malformed: return "Malformed";
  }
  return "Unknown";
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

std::string file_digest(const std::vector<std::string>& lines) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
    h = fnv1a64(lines[i], h);
    h = fnv1a64("\n", h);
  }
  return to_hex(h);
}

ReplayReport replay_lines(const std::vector<std::string>& lines) {
  ReplayReport r;
  if (lines.size() < 2) {
    r.message = "log has fewer than two records";
    return r;
  }
  ordered_json first;
  ordered_json last;
  try {
    last = ordered_json::parse(lines.back());
    r.embedded_digest = last.at("detail").at("digest").get<std::string>();
    if (last.at("kind") != "run_end") throw std::runtime_error("last record is not run_end");
  } catch (const std::exception& e) {
    r.message = std::string("unreadable run_end record: ") + e.what();
    return r;
  }
  r.file_digest = file_digest(lines);
  if (r.file_digest != r.embedded_digest) {
    r.verdict = ReplayVerdict::DigestMismatch;
    r.message = "log contents do not match the embedded digest";
    return r;
  }

  ScenarioConfig config;
  try {
    first = ordered_json::parse(lines.front());
    if (first.at("kind") != "run_start") throw std::runtime_error("first record is not run_start");
    const ordered_json& d = first.at("detail");
    if (d.at("version").get<std::string>() != kVersion) {
      r.message = "log was produced by " + d.at("version").get<std::string>();
      return r;
    }
    config = parse_scenario(d.at("config"));
    config.seed = d.at("seed").get<std::uint64_t>();
  } catch (const std::exception& e) {
    r.message = std::string("unreadable run_start record: ") + e.what();
    return r;
  }

  r.rerun_digest = run_scenario(config).digest;
  if (r.rerun_digest == r.embedded_digest) {
    r.verdict = ReplayVerdict::Match;
  } else {
    r.verdict = ReplayVerdict::DigestMismatch;
    r.message = "re-run produced a different event log";
  }
  return r;
}

ReplayReport replay(const std::string& log_path) { return replay_lines(read_lines(log_path)); }

namespace {

std::string kind_key(const std::string& line) {
  try {
    const ordered_json j = ordered_json::parse(line);
    return j.at("source").get<std::string>() + "/" + j.at("kind").get<std::string>();
  } catch (const std::exception&) {
    return "<unparsed>";
  }
}

}  // namespace

LogDiff diff_logs(const std::vector<std::string>& left, const std::vector<std::string>& right,
                  std::size_t max_samples) {
  LogDiff d;
  d.left_events = left.size();
  d.right_events = right.size();
  const std::size_t n = std::max(left.size(), right.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::string* l = i < left.size() ? &left[i] : nullptr;
    const std::string* r = i < right.size() ? &right[i] : nullptr;
    if (l && r && *l == *r) continue;
    if (!d.first_divergence) d.first_divergence = i;
    if (d.samples.size() < max_samples) d.samples.push_back({i, l ? *l : "", r ? *r : ""});
  }
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
  for (const std::string& l : left) ++counts[kind_key(l)].first;
  for (const std::string& r : right) ++counts[kind_key(r)].second;
  for (const auto& [k, c] : counts) {
    if (c.first != c.second) d.kind_counts[k] = c;
  }
  return d;
}

}  // namespace goldsim
