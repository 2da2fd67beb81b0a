#pragma once

#include <map>
#include <span>
#include <vector>

#include "swarmcap/connectivity.hpp"
#include "swarmcap/kinematics.hpp"
#include "swarmcap/pheromone_field.hpp"

namespace swarmcap {

struct HelloMessage {
  int sender_id{0};
  Vec2 position{};
  Cell next_waypoint_cell{};
  PheromonePatch patch{};
  double timestamp{0.0};

  bool operator==(const HelloMessage&) const = default;
};

struct NeighborEntry {
  Vec2 position{};
  Cell next_waypoint_cell{};
  double timestamp{0.0};
};

/// Latest hello per neighbour. Readers pass the current time and a maximum
/// age; older entries are treated as gone.
class NeighborTable {
 public:
  void upsert(const HelloMessage& msg) {
    auto [it, inserted] = entries_.try_emplace(msg.sender_id);
    if (inserted || msg.timestamp >= it->second.timestamp)
      it->second = {msg.position, msg.next_waypoint_cell, msg.timestamp};
  }

  void expire(double now, double max_age) {
    std::erase_if(entries_, [&](const auto& kv) { return now - kv.second.timestamp > max_age; });
  }

  std::vector<NeighborClaim> claims(double now, double max_age) const {
    std::vector<NeighborClaim> out;
    for (const auto& [id, e] : entries_)
      if (now - e.timestamp <= max_age) out.push_back({id, e.next_waypoint_cell, e.timestamp});
    return out;
  }

  template <typename Fn>
  void for_each_fresh(double now, double max_age, Fn&& fn) const {
    for (const auto& [id, e] : entries_)
      if (now - e.timestamp <= max_age) fn(id, e);
  }

  const NeighborEntry* find(int id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::map<int, NeighborEntry> entries_;
};

inline HelloMessage build_hello(const UavState& uav, const PheromoneField& field, double t) {
  return {uav.id, uav.position, uav.next_waypoint_cell, field.extract_patch(uav.current_cell), t};
}

using Inbox = std::vector<HelloMessage>;

/// Lossless same-tick delivery to every other node within range
/// (inclusive). Inboxes follow the order of `positions`.
inline std::vector<Inbox> deliver(std::span<const HelloMessage> messages,
                                  std::span<const NodePosition> positions, double tx) {
  std::vector<Inbox> inboxes(positions.size());
  for (std::size_t r = 0; r < positions.size(); ++r)
    for (const auto& msg : messages) {
      if (msg.sender_id == positions[r].id) continue;
      if (distance(msg.position, positions[r].position) <= tx) inboxes[r].push_back(msg);
    }
  return inboxes;
}

inline void apply_inbox(NeighborTable& table, PheromoneField& field,
                        std::span<const HelloMessage> inbox) {
  for (const auto& msg : inbox) {
    field.merge_patch(msg.patch);
    table.upsert(msg);
  }
}

}  // namespace swarmcap
