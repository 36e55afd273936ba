#pragma once

#include <iosfwd>
#include <optional>
#include <variant>

#include "swmsim/model.hpp"

namespace swmsim {

// Line-based instance text:
//   switch B=<int> N=<int|auto>
//   queue <id> live=<b>..<e> init=<int>     (timeline form)
//   arrive t=<int> q=<int> n=<int>          (explicit arrivals)
// '#' starts a comment. A file uses one form only.
struct InstanceFile {
  Count B = 1;
  std::optional<std::int64_t> N;  // nullopt for N=auto
  std::variant<QueueTimeline, ArrivalSchedule> body{QueueTimeline{}};

  SwitchConfig config() const { return {B, N}; }
  bool is_timeline() const { return std::holds_alternative<QueueTimeline>(body); }
  // Timeline bodies are expanded; physical queues are reused after B idle slots.
  ArrivalSchedule schedule() const;
};

InstanceFile read_instance(std::istream& in);
void write_instance(const InstanceFile& instance, std::ostream& out);

}  // namespace swmsim
