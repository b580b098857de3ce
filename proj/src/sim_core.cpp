#include "goldsim/sim_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace goldsim {

EventHandle Scheduler::schedule(SimTime fire_at, int priority, std::string_view kind, Action action) {
  if (fire_at < now_) {
    throw PastTimeError("cannot schedule '" + std::string(kind) + "' at t=" +
                        std::to_string(fire_at.ms) + " when now=" + std::to_string(now_.ms));
  }
  const std::uint64_t seq = next_seq_++;
  heap_.push_back(Entry{fire_at, priority, seq, kind, std::move(action)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
  live_.insert(seq);
  return EventHandle{seq};
}

bool Scheduler::cancel(EventHandle h) {
  if (live_.erase(h.seq) == 0) return false;
  cancelled_.insert(h.seq);
  return true;
}

std::size_t Scheduler::run_until(SimTime end) {
  if (end < now_) {
    throw PastTimeError("run_until(" + std::to_string(end.ms) + ") before now=" + std::to_string(now_.ms));
  }
  std::size_t count = 0;
  while (!heap_.empty() && heap_.front().fire_at <= end) {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Entry e = std::move(heap_.back());
    heap_.pop_back();
    if (cancelled_.erase(e.seq) > 0) continue;
    live_.erase(e.seq);
    now_ = e.fire_at;
    ++count;
    ++fired_;
    e.action();
  }
  now_ = end;
  return count;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RngStream::RngStream(std::uint64_t seed, std::string label)
    : label_(std::move(label)), key_(mix64(seed ^ mix64(fnv1a64(label_)))) {}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next_u64());
  return lo + static_cast<std::int64_t>(next_u64() % span);
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 in (0, 1] keeps log finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double RngStream::exponential(double mean) { return -mean * std::log(1.0 - uniform()); }

double RngStream::lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string EventLogRecord::to_line() const {
  nlohmann::ordered_json j;
  j["t"] = t.ms;
  j["source"] = source;
  j["kind"] = kind;
  j["detail"] = detail;
  return j.dump();
}

void EventLog::append(SimTime t, std::string source, std::string kind, nlohmann::ordered_json detail) {
  if (t < last_t_) {
    throw std::logic_error("event log is append-only in time: t=" + std::to_string(t.ms) +
                           " after t=" + std::to_string(last_t_.ms));
  }
  last_t_ = t;
  EventLogRecord rec{t, std::move(source), std::move(kind), std::move(detail)};
  const std::string line = rec.to_line();
  digest_ = fnv1a64(line, digest_);
  digest_ = fnv1a64("\n", digest_);
  ++count_;
  if (sink_ != nullptr) *sink_ << line << '\n';
  if (retain_) records_.push_back(std::move(rec));
}

std::string EventLog::digest_hex() const { return to_hex(digest_); }

}  // namespace goldsim
