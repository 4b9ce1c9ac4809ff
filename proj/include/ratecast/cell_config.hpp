#pragma once

namespace ratecast {

// Static cell parameters shared by the simulator and the sniffer.
// 10 MHz FDD: 50 resource blocks in each direction. The control region
// carries n_cce control channel elements of 72 bits each per subframe.
struct CellConfig {
    unsigned n_rb = 50;
    unsigned n_cce = 41;
};

inline constexpr unsigned kCceBits = 72;
inline constexpr unsigned kAggLevels[4] = {1, 2, 4, 8};

// Uplink grants take effect four subframes after the control message.
inline constexpr unsigned kUplinkDelay = 4;

}  // namespace ratecast
