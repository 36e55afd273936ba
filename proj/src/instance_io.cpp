#include "swmsim/instance_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace swmsim {
namespace {

std::int64_t parse_int(const std::string& s, const std::string& what, std::size_t line) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw InputError("line " + std::to_string(line) + ": bad " + what + " '" + s + "'");
  return v;
}

// Splits "key=value"; the key must match.
std::string field(const std::string& token, const std::string& key, std::size_t line) {
  if (token.size() <= key.size() || token.compare(0, key.size() + 1, key + "=") != 0)
    throw InputError("line " + std::to_string(line) + ": expected " + key + "=..., got '" + token + "'");
  return token.substr(key.size() + 1);
}

}  // namespace

ArrivalSchedule InstanceFile::schedule() const {
  if (auto* s = std::get_if<ArrivalSchedule>(&body)) return *s;
  return expand(std::get<QueueTimeline>(body), config(), B);
}

InstanceFile read_instance(std::istream& in) {
  InstanceFile f;
  bool have_switch = false;
  enum class Form { None, Timeline, Arrivals } form = Form::None;
  QueueTimeline timeline;
  std::vector<std::tuple<Slot, QueueId, Count>> arrivals;

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string at = "line " + std::to_string(lineno) + ": ";

    if (tok[0] == "switch") {
      if (have_switch) throw InputError(at + "second switch line");
      if (tok.size() != 3) throw InputError(at + "expected 'switch B=<int> N=<int|auto>'");
      f.B = parse_int(field(tok[1], "B", lineno), "B", lineno);
      std::string n = field(tok[2], "N", lineno);
      if (n != "auto") f.N = parse_int(n, "N", lineno);
      have_switch = true;
      SwitchConfig{f.B, f.N}.validate();
    } else if (tok[0] == "queue") {
      if (!have_switch) throw InputError(at + "queue before the switch line");
      if (form == Form::Arrivals) throw InputError(at + "queue lines cannot be mixed with arrive lines");
      form = Form::Timeline;
      if (tok.size() != 4) throw InputError(at + "expected 'queue <id> live=<b>..<e> init=<int>'");
      QueueLife life;
      life.id = parse_int(tok[1], "queue id", lineno);
      std::string live = field(tok[2], "live", lineno);
      auto dots = live.find("..");
      if (dots == std::string::npos) throw InputError(at + "live interval must be <b>..<e>");
      life.begin = parse_int(live.substr(0, dots), "interval start", lineno);
      life.end = parse_int(live.substr(dots + 2), "interval end", lineno);
      life.initial_load = parse_int(field(tok[3], "init", lineno), "initial load", lineno);
      if (life.initial_load < 0 || life.initial_load > f.B) throw InputError(at + "init outside [0, B]");
      if (life.has_interval() && life.begin < 1) throw InputError(at + "arrival intervals start at slot 1 or later");
      if (timeline.find(life.id)) throw InputError(at + "duplicate queue " + std::to_string(life.id));
      try {
        timeline.add(life);
      } catch (const ContractError& e) {
        throw InputError(at + e.what());
      }
    } else if (tok[0] == "arrive") {
      if (!have_switch) throw InputError(at + "arrive before the switch line");
      if (form == Form::Timeline) throw InputError(at + "arrive lines cannot be mixed with queue lines");
      form = Form::Arrivals;
      if (tok.size() != 4) throw InputError(at + "expected 'arrive t=<int> q=<int> n=<int>'");
      Slot t = parse_int(field(tok[1], "t", lineno), "slot", lineno);
      QueueId q = parse_int(field(tok[2], "q", lineno), "queue", lineno);
      Count n = parse_int(field(tok[3], "n", lineno), "count", lineno);
      if (t < 0 || q < 1 || n < 0 || n > f.B) throw InputError(at + "arrival out of range");
      if (f.N && q > *f.N) throw InputError(at + "queue id above N");
      arrivals.emplace_back(t, q, n);
    } else {
      throw InputError(at + "unknown directive '" + tok[0] + "'");
    }
  }
  if (!have_switch) throw InputError("missing switch line");
  if (form == Form::Arrivals) {
    ArrivalSchedule s(f.B);
    for (auto [t, q, n] : arrivals) s.add(t, q, n);
    f.body = std::move(s);
  } else {
    f.body = std::move(timeline);
  }
  return f;
}

void write_instance(const InstanceFile& f, std::ostream& out) {
  out << "switch B=" << f.B << " N=" << (f.N ? std::to_string(*f.N) : "auto") << '\n';
  if (auto* tl = std::get_if<QueueTimeline>(&f.body)) {
    for (const auto& q : tl->queues())
      out << "queue " << q.id << " live=" << q.begin << ".." << q.end << " init=" << q.initial_load << '\n';
    return;
  }
  const auto& s = std::get<ArrivalSchedule>(f.body);
  for (Slot t = 0; t <= s.horizon(); ++t)
    for (const auto& a : s.at(t))
      if (a.count > 0) out << "arrive t=" << t << " q=" << a.queue << " n=" << a.count << '\n';
}

}  // namespace swmsim
