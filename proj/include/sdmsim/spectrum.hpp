#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sdmsim/topology.hpp"

namespace sdmsim {

struct Path;  // routing.hpp

struct SpectrumConfig {
  int cores = 4;
  int slots_per_core = 320;
  double slot_bandwidth_ghz = 12.5;
  int guard_slots = 1;
};

// Fixed-width bitset over spectrum slots, one bit per slot (1 = occupied).
class SlotBitmap {
 public:
  SlotBitmap() = default;
  explicit SlotBitmap(int bits);

  int size() const { return bits_; }
  bool test(int i) const {
    return (words_[static_cast<size_t>(i) >> 6] >> (i & 63)) & 1u;
  }
  bool range_free(int begin, int end) const;  // [begin, end)
  void set_range(int begin, int end);
  void clear_range(int begin, int end);
  int count() const;

  // Smallest index i such that slots [i, i+width) are all free, or -1.
  int first_free_run(int width) const;

  const std::vector<uint64_t>& words() const { return words_; }

  bool operator==(const SlotBitmap&) const = default;

 private:
  int bits_ = 0;
  std::vector<uint64_t> words_;
};

// One direction of one fiber link: per-core slot occupancy.
struct LinkSpectrumState {
  std::vector<SlotBitmap> core_occ;
  std::vector<int> occupied_per_core;  // running popcounts

  bool operator==(const LinkSpectrumState&) const = default;
};

// Slot occupancy ratio of one directed link state, averaged over cores.
double sor(const LinkSpectrumState& ls, const SpectrumConfig& cfg);

// Total occupied slots across cores of one directed link state.
int traffic_load(const LinkSpectrumState& ls);

struct Allocation {
  int64_t lightpath_id;
  std::vector<int> directed_links;  // directed indices along the path
  int core;
  int start_slot;
  int data_slots;
  int guard_slots_used;  // 0 when the data window ends at the spectrum edge
  double expiry_time;
  bool counted;  // arrived after warm-up (set by the engine)
};

// Per-direction spectrum state for every link, plus the ledger of active
// lightpaths. Directed index of link l is 2l (u->v) or 2l+1 (v->u).
class NetworkState {
 public:
  NetworkState(const Topology& t, const SpectrumConfig& cfg);

  const SpectrumConfig& config() const { return cfg_; }
  int directed_count() const { return static_cast<int>(states_.size()); }
  const LinkSpectrumState& directed(int idx) const {
    return states_[static_cast<size_t>(idx)];
  }
  int directed_index(LinkId l, NodeId from) const;

  // First-fit start slot for `data_slots` on `core` along every directed link
  // of the path, honoring the guard band (omitted at the spectrum edge).
  std::optional<int> find_first_fit(const Path& p, int core,
                                    int data_slots) const;

  // Marks data+guard slots on every link of the path. Throws std::logic_error
  // on any conflict or duplicate id.
  const Allocation& allocate(const Path& p, int core, int start_slot,
                             int data_slots, double expiry_time,
                             int64_t lightpath_id, bool counted = true);

  // Returns the released allocation. Throws std::logic_error on unknown id.
  Allocation release(int64_t lightpath_id);

  const std::unordered_map<int64_t, Allocation>& active() const {
    return ledger_;
  }
  int64_t total_occupied_slots() const;

  // One line per directed link/core of 0/1 characters.
  std::string dump() const;

  // Recomputes popcounts and cross-checks the ledger; throws on mismatch.
  void verify_invariants() const;

 private:
  const Topology* topo_;
  SpectrumConfig cfg_;
  std::vector<LinkSpectrumState> states_;
  std::unordered_map<int64_t, Allocation> ledger_;

  void mark(const Allocation& a, bool occupy);
};

}  // namespace sdmsim
