#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace crlab {

/// Binary user-to-channel selection b[j][m] over the available channel set.
struct ChannelAllocation {
  int users = 0;
  int channels = 0;
  std::vector<int> available;     ///< A(t), ascending channel indices
  std::vector<std::uint8_t> b;    ///< row-major users x channels

  ChannelAllocation() = default;
  ChannelAllocation(int n_users, int n_channels, std::vector<int> available_channels);

  bool at(int user, int channel) const { return b[index(user, channel)] != 0; }
  void set(int user, int channel, bool on) { b[index(user, channel)] = on ? 1 : 0; }

  /// Channel the user receives from, or -1.
  int channel_of(int user) const;
  /// Users on the channel, ascending.
  std::vector<int> users_on(int channel) const;
  bool is_available(int channel) const;

  /// Throws DomainError when a user has two channels, a channel holds more
  /// than `max_per_channel` users, or an unavailable channel is used.
  void check(int max_per_channel) const;

 private:
  std::size_t index(int user, int channel) const {
    return static_cast<std::size_t>(user) * static_cast<std::size_t>(channels) + static_cast<std::size_t>(channel);
  }
};

}  // namespace crlab
