#pragma once

#include <cstdint>
#include <memory>
#include <queue>
#include <variant>
#include <vector>

#include "bubblesim/order_book.hpp"
#include "bubblesim/types.hpp"

namespace bubblesim {

class Kernel;
class PriceSeries;

struct OrderSubmission {
  Order order;
};

struct CancelRequest {
  OrderId id{0};
};

struct BookQuery {};

/// Book state plus a causal view of the exchange's per-second mid history:
/// only the first `history_len` samples of `*history` existed when the
/// snapshot was taken.
struct SnapshotReport {
  BookSnapshot book;
  const PriceSeries* history{nullptr};
  std::size_t history_len{0};
};

struct FillReport {
  Trade trade;
  OrderId order{0};  // recipient's own order
  Side side{Side::buy};
};

struct CancelReport {
  OrderId order{0};
  Shares qty{0};
  bool ok{false};
};

struct Wakeup {};

using Payload = std::variant<OrderSubmission, CancelRequest, BookQuery, SnapshotReport, FillReport,
                             CancelReport, Wakeup>;

struct Message {
  SimTime send_time{};
  SimTime deliver_time{};
  AgentId sender{kNoAgent};
  AgentId recipient{kNoAgent};
  Payload payload;
};

class Agent {
 public:
  virtual ~Agent() = default;

  AgentId id() const { return id_; }

  /// Called once at t=0 before any message is delivered.
  virtual void on_start(Kernel&) {}
  virtual void on_wakeup(Kernel&, SimTime) {}
  virtual void on_message(Kernel&, const Message&) {}

 private:
  friend class Kernel;
  AgentId id_{kNoAgent};
};

struct KernelStats {
  std::uint64_t messages_delivered{0};
  std::uint64_t wakeups_fired{0};
  std::uint64_t trades{0};
  std::uint64_t pending{0};  // still queued when the call returned
};

/// Pending events ordered by (deliver_time, insertion sequence).
class EventQueue {
 public:
  void push(Message msg);
  Message pop();
  const Message& top() const { return heap_.top().msg; }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  std::uint64_t last_sequence() const { return next_seq_; }

 private:
  struct Entry {
    std::uint64_t seq;
    Message msg;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.msg.deliver_time != b.msg.deliver_time) return a.msg.deliver_time > b.msg.deliver_time;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::uint64_t next_seq_{0};
};

/// Single-threaded discrete-event engine. Owns its agents; a Kernel (and so a
/// whole simulation) can be moved to another thread but never shared.
class Kernel {
 public:
  explicit Kernel(SimTime latency = SimTime::from_micros(1)) : latency_(latency) {}

  Kernel(const Kernel&) = delete;
  Kernel& operator=(const Kernel&) = delete;
  Kernel(Kernel&&) = default;
  Kernel& operator=(Kernel&&) = default;

  template <typename A>
  A& add_agent(std::unique_ptr<A> agent) {
    A& ref = *agent;
    agent->id_ = static_cast<AgentId>(agents_.size());
    agents_.push_back(std::move(agent));
    return ref;
  }

  Agent& agent(AgentId id) { return *agents_.at(id); }
  std::size_t agent_count() const { return agents_.size(); }

  /// Throws std::logic_error if deliver_time is before now() or before send_time.
  void schedule(Message msg);

  /// Sends with the configured latency: delivered at now() + latency.
  void send(AgentId from, AgentId to, Payload payload);

  /// Throws std::logic_error for a time before now().
  void set_wakeup(AgentId agent, SimTime t);

  /// Processes every event with deliver_time <= end, then advances now() to end.
  KernelStats run_until(SimTime end);

  SimTime now() const { return now_; }
  SimTime latency() const { return latency_; }
  std::size_t pending() const { return queue_.size(); }
  const KernelStats& stats() const { return stats_; }
  void record_trades(std::uint64_t n) { stats_.trades += n; }

  /// Running hash over every delivered event (time, sequence, endpoints, kind).
  std::uint64_t trace_hash() const { return trace_hash_; }

 private:
  void start();

  SimTime latency_;
  SimTime now_{};
  bool started_{false};
  EventQueue queue_;
  std::vector<std::unique_ptr<Agent>> agents_;
  KernelStats stats_;
  std::uint64_t delivered_seq_{0};
  std::uint64_t trace_hash_{0xcbf29ce484222325ULL};
};

}  // namespace bubblesim
