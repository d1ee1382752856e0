#include "bubblesim/kernel.hpp"

#include <stdexcept>
#include <string>

#include "bubblesim/random.hpp"

namespace bubblesim {

void EventQueue::push(Message msg) { heap_.push(Entry{next_seq_++, std::move(msg)}); }

Message EventQueue::pop() {
  Message msg = heap_.top().msg;
  heap_.pop();
  return msg;
}

void Kernel::schedule(Message msg) {
  if (msg.deliver_time < now_)
    throw std::logic_error("message scheduled in the past: deliver_time=" +
                           std::to_string(msg.deliver_time.nanos) + " now=" + std::to_string(now_.nanos));
  if (msg.deliver_time < msg.send_time) throw std::logic_error("negative message latency");
  if (msg.recipient >= agents_.size()) throw std::out_of_range("unknown recipient");
  queue_.push(std::move(msg));
}

void Kernel::send(AgentId from, AgentId to, Payload payload) {
  schedule(Message{now_, now_ + latency_, from, to, std::move(payload)});
}

void Kernel::set_wakeup(AgentId agent, SimTime t) {
  if (t < now_)
    throw std::logic_error("wakeup requested in the past for agent " + std::to_string(agent));
  schedule(Message{now_, t, agent, agent, Wakeup{}});
}

void Kernel::start() {
  started_ = true;
  for (auto& a : agents_) a->on_start(*this);
}

KernelStats Kernel::run_until(SimTime end) {
  if (!started_) start();
  while (!queue_.empty() && queue_.top().deliver_time <= end) {
    Message msg = queue_.pop();
    now_ = msg.deliver_time;
    ++delivered_seq_;
    std::uint64_t h = hash_combine(trace_hash_, static_cast<std::uint64_t>(now_.nanos));
    h = hash_combine(h, delivered_seq_);
    h = hash_combine(h, (static_cast<std::uint64_t>(msg.sender) << 32) | msg.recipient);
    trace_hash_ = hash_combine(h, msg.payload.index());

    Agent& target = *agents_[msg.recipient];
    if (std::holds_alternative<Wakeup>(msg.payload)) {
      ++stats_.wakeups_fired;
      target.on_wakeup(*this, now_);
    } else {
      ++stats_.messages_delivered;
      target.on_message(*this, msg);
    }
  }
  if (end > now_) now_ = end;
  stats_.pending = queue_.size();
  return stats_;
}

}  // namespace bubblesim
