#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace radiocast {

using Round = int;
using Bytes = std::string;  // raw octets, not necessarily UTF-8

enum class MessageKind { source_payload, stay, ack, initialize, ready };

inline std::string_view to_string(MessageKind k) {
  switch (k) {
    case MessageKind::source_payload: return "source_payload";
    case MessageKind::stay: return "stay";
    case MessageKind::ack: return "ack";
    case MessageKind::initialize: return "initialize";
    case MessageKind::ready: return "ready";
  }
  return "unknown";
}

inline MessageKind message_kind_from_string(std::string_view name) {
  for (auto k : {MessageKind::source_payload, MessageKind::stay, MessageKind::ack, MessageKind::initialize,
                 MessageKind::ready})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown message kind '" + std::string(name) + "'");
}

// A radio frame. Broadcast-bearing kinds (source_payload, initialize, ready)
// are the "source message" of whichever broadcast is running; stay and ack are
// control frames. Byte payloads (the source message mu) travel in `payload`,
// integer side values (the timestamp bound T, the common round m) in `value`.
struct Message {
  MessageKind kind = MessageKind::source_payload;
  std::optional<Round> stamp;
  std::optional<Bytes> payload;
  std::optional<std::int64_t> value;

  bool is_broadcast() const { return kind != MessageKind::stay && kind != MessageKind::ack; }

  Message stamped(Round k) const {
    Message m = *this;
    m.stamp = k;
    return m;
  }

  friend bool operator==(const Message&, const Message&) = default;
};

class MalformedMessage : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void validate(const Message& m) {
  if (m.stamp && *m.stamp < 1) throw MalformedMessage("stamp must be a positive round number");
  switch (m.kind) {
    case MessageKind::stay:
      if (m.payload || m.value) throw MalformedMessage("stay carries no auxiliary data");
      break;
    case MessageKind::ack:
      if (!m.stamp) throw MalformedMessage("ack must carry a round stamp");
      break;
    case MessageKind::ready:
      if (!m.value) throw MalformedMessage("ready must carry T");
      break;
    default:
      break;
  }
}

}  // namespace radiocast
