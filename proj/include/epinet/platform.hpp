#ifndef EPINET_PLATFORM_HPP
#define EPINET_PLATFORM_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "epinet/epinet.hpp"

namespace epinet {

enum class EventKind {
  DirectMessage,
  AckRead,
  Broadcast,
  Reaction,
  CoPresence,
  ChannelPost,
  Recording,
  ProfileView,
  PetitionSign,
  Leak,
};

const char* event_kind_name(EventKind k);
EventKind event_kind_from_string(const std::string& s);

struct EventFlags {
  bool covert = false;
  bool acknowledged = false;
  bool consent = false;

  bool operator==(const EventFlags&) const = default;
};

struct Event {
  std::string id;  // assigned on apply when empty
  EventKind kind = EventKind::DirectMessage;
  AgentId sender;
  std::set<AgentId> visible_recipients;
  std::set<AgentId> hidden_recipients;
  PropId payload;
  std::optional<std::string> thread;  // thread token, or channel id for channel events
  EventFlags flags;

  bool operator==(const Event&) const = default;
};

// Applies one communication primitive and returns it with its id assigned.
// Deliveries store knowledge when the payload is true in the world and mere
// belief otherwise; provenance hops record whether the receiver fully
// trusted the sender at delivery time. Facts that would exceed max_depth are
// dropped rather than rejected, so long threads cap out instead of failing.
Event apply_event(Epinet& net, Event e);

// Reply within an existing thread: the receiver absorbs every sender-rooted
// fact the thread has made public, raising commonality by one level per
// message. Both parties must already be participants.
void reply_in_thread(Epinet& net, const std::string& thread, const AgentId& from,
                     const AgentId& to, const PropId& p);

// Named platform presets: data documents mapping action names to primitive
// templates with ${placeholder} substitution.
class PresetLibrary {
 public:
  static PresetLibrary builtin();
  static PresetLibrary from_json_text(const std::string& text);

  bool has_platform(const std::string& platform) const;
  bool has_action(const std::string& platform, const std::string& action) const;
  const nlohmann::json& templates(const std::string& platform, const std::string& action) const;
  std::vector<std::string> platforms() const;

 private:
  nlohmann::json doc_;
};

// Builds an Event from key=value arguments, e.g. direct_message with
// from=..., to=a,b, bcc=c, prop=..., thread=....
Event build_event_from_args(const std::string& kind,
                            const std::map<std::string, std::string>& args);

// Runs one primitive by name: any event kind plus reply, trust, ck and
// join_ck. Applied platform events are appended to log when given.
void run_primitive(Epinet& net, const std::string& kind,
                   const std::map<std::string, std::string>& args, std::vector<Event>* log);

// Expands a preset action into primitives and applies them in order. Returns
// the platform events that were applied (trust or common-knowledge primitives
// produce no Event).
std::vector<Event> run_preset_action(Epinet& net, const PresetLibrary& presets,
                                     const std::string& platform, const std::string& action,
                                     std::map<std::string, std::string> args);

// One line of the event log.
nlohmann::json event_to_json(const Event& e);

}  // namespace epinet

#endif
