#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "goldsim/types.hpp"

namespace goldsim {

// Lower fires first when two events share a timestamp.
namespace priority {
constexpr int kRisk = 0;
constexpr int kLedger = 1;
constexpr int kAgent = 2;
constexpr int kMetrics = 3;
}  // namespace priority

// Compact logs keep governance, alerts, attestations, block summaries and
// reverted receipts; Full adds routine receipts and workflow transitions.
enum class LogLevel { Compact, Full };

class PastTimeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct EventHandle {
  std::uint64_t seq{0};
};

// Deterministic discrete-event scheduler. Events are totally ordered by
// (fire_at, priority, seq) where seq is the insertion counter.
class Scheduler {
 public:
  using Action = std::function<void()>;

  EventHandle schedule(SimTime fire_at, int priority, std::string_view kind, Action action);
  EventHandle schedule_in(Millis delay, int priority, std::string_view kind, Action action) {
    return schedule(now_ + delay, priority, kind, std::move(action));
  }

  // Returns false when the event already fired or was never scheduled.
  bool cancel(EventHandle h);

  // Processes every event with fire_at <= end, then sets now() to end.
  std::size_t run_until(SimTime end);

  SimTime now() const { return now_; }
  std::size_t pending() const { return heap_.size() - cancelled_.size(); }
  std::uint64_t fired() const { return fired_; }

 private:
  struct Entry {
    SimTime fire_at;
    int priority;
    std::uint64_t seq;
    std::string_view kind;
    Action action;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      if (a.priority != b.priority) return a.priority > b.priority;
      return a.seq > b.seq;
    }
  };

  std::vector<Entry> heap_;
  std::unordered_set<std::uint64_t> cancelled_;
  std::unordered_set<std::uint64_t> live_;
  SimTime now_{};
  std::uint64_t next_seq_{0};
  std::uint64_t fired_{0};
};

// Counter-based generator keyed by (seed, label): output i is
// splitmix64(key + (i + 1) * golden). Streams never share state, so adding a
// consumer does not perturb existing ones.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string label);

  std::uint64_t next_u64();
  double uniform();                          // [0, 1)
  double uniform(double lo, double hi);      // [lo, hi)
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);  // inclusive
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  double exponential(double mean);
  double lognormal(double mu, double sigma);
  bool bernoulli(double p) { return uniform() < p; }

  const std::string& label() const { return label_; }
  std::uint64_t draws() const { return counter_; }

 private:
  std::string label_;
  std::uint64_t key_;
  std::uint64_t counter_{0};
  bool has_spare_{false};
  double spare_{0.0};
};

std::uint64_t mix64(std::uint64_t z);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

struct EventLogRecord {
  SimTime t;
  std::string source;
  std::string kind;
  nlohmann::ordered_json detail;

  std::string to_line() const;
};

// Append-only structured log with a running FNV-1a digest over the
// serialized lines. Retention of records and streaming to a sink are
// independent of the digest.
class EventLog {
 public:
  explicit EventLog(bool retain = true) : retain_(retain) {}

  void append(SimTime t, std::string source, std::string kind,
              nlohmann::ordered_json detail = nlohmann::ordered_json::object());

  void set_sink(std::ostream* sink) { sink_ = sink; }

  std::uint64_t digest() const { return digest_; }
  std::string digest_hex() const;
  std::size_t size() const { return count_; }
  const std::vector<EventLogRecord>& records() const { return records_; }

 private:
  bool retain_;
  std::ostream* sink_{nullptr};
  std::vector<EventLogRecord> records_;
  std::uint64_t digest_{0xcbf29ce484222325ULL};
  std::size_t count_{0};
  SimTime last_t_{};
};

std::string to_hex(std::uint64_t v);

}  // namespace goldsim
