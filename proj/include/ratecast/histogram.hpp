#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <vector>

#include "ratecast/dci.hpp"

namespace ratecast {

// Sliding-window occurrence counter over (RNTI, format) pairs. An RNTI is
// considered present once any of its formats reaches `threshold` hits
// within the trailing `window` subframes. Everything updates incrementally;
// per-subframe cost is proportional to occurrences entering and leaving.
class RntiHistogram {
  public:
    explicit RntiHistogram(unsigned window = 500, unsigned threshold = 8)
        : window_(window), threshold_(threshold) {
        counts_.assign(kSlots, 0);
        last_sf_.assign(kSlots, kNever);
        masks_.assign(65536, 0);
    }

    unsigned window() const { return window_; }
    unsigned threshold() const { return threshold_; }

    // Drops occurrences older than [s - window + 1, s].
    void begin_subframe(std::uint64_t s) {
        while (!ring_.empty() && ring_.front().sf + window_ <= s) {
            const Entry e = ring_.front();
            ring_.pop_front();
            const std::size_t slot = slot_of(e.rnti, e.fmt);
            if (--counts_[slot] == threshold_ - 1) on_drop(e.rnti, e.fmt);
        }
    }

    // Records one occurrence; repeats within one subframe are ignored.
    // Returns the in-window count for (rnti, fmt) afterwards.
    unsigned record(std::uint16_t rnti, DciFormat fmt, std::uint64_t s) {
        const std::size_t slot = slot_of(rnti, static_cast<std::uint8_t>(fmt));
        if (last_sf_[slot] == s) return counts_[slot];
        last_sf_[slot] = s;
        ring_.push_back({s, rnti, static_cast<std::uint8_t>(fmt)});
        if (++counts_[slot] == threshold_) on_rise(rnti, static_cast<std::uint8_t>(fmt));
        return counts_[slot];
    }

    unsigned count(std::uint16_t rnti, DciFormat fmt) const {
        return counts_[slot_of(rnti, static_cast<std::uint8_t>(fmt))];
    }

    bool active(std::uint16_t rnti) const { return masks_[rnti] != 0; }

    unsigned n_ue() const { return n_ue_; }
    unsigned n_ue_dl() const { return n_ue_dl_; }
    unsigned n_ue_ul() const { return n_ue_ul_; }

    std::vector<std::uint16_t> active_rntis() const {
        std::vector<std::uint16_t> out;
        for (std::uint32_t r = 0; r < 65536; ++r) {
            if (masks_[r]) out.push_back(static_cast<std::uint16_t>(r));
        }
        return out;
    }

  private:
    struct Entry {
        std::uint64_t sf;
        std::uint16_t rnti;
        std::uint8_t fmt;
    };

    static constexpr std::size_t kSlots = std::size_t(65536) * 6;
    static constexpr std::uint64_t kNever = ~std::uint64_t(0);
    static constexpr std::uint8_t kUlMask = 1u << static_cast<unsigned>(DciFormat::F0);
    static constexpr std::uint8_t kDlMask = 0x3F & ~kUlMask;

    static std::size_t slot_of(std::uint16_t rnti, std::uint8_t fmt) {
        return std::size_t(rnti) * 6 + fmt;
    }

    void on_rise(std::uint16_t rnti, std::uint8_t fmt) {
        const std::uint8_t bit = static_cast<std::uint8_t>(1u << fmt);
        const std::uint8_t old = masks_[rnti];
        masks_[rnti] = old | bit;
        if (!old) ++n_ue_;
        if ((bit & kDlMask) && !(old & kDlMask)) ++n_ue_dl_;
        if ((bit & kUlMask) && !(old & kUlMask)) ++n_ue_ul_;
    }

    void on_drop(std::uint16_t rnti, std::uint8_t fmt) {
        const std::uint8_t bit = static_cast<std::uint8_t>(1u << fmt);
        const std::uint8_t now = masks_[rnti] & ~bit;
        masks_[rnti] = now;
        if (!now) --n_ue_;
        if ((bit & kDlMask) && !(now & kDlMask)) --n_ue_dl_;
        if ((bit & kUlMask) && !(now & kUlMask)) --n_ue_ul_;
    }

    unsigned window_, threshold_;
    std::vector<std::uint16_t> counts_;
    std::vector<std::uint64_t> last_sf_;
    std::vector<std::uint8_t> masks_;
    std::deque<Entry> ring_;
    unsigned n_ue_ = 0, n_ue_dl_ = 0, n_ue_ul_ = 0;
};

}  // namespace ratecast
