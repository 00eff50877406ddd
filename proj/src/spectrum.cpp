#include "sdmsim/spectrum.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

#include "sdmsim/routing.hpp"

namespace sdmsim {

SlotBitmap::SlotBitmap(int bits)
    : bits_(bits), words_(static_cast<size_t>((bits + 63) / 64), 0) {}

bool SlotBitmap::range_free(int begin, int end) const {
  for (int i = begin; i < end; ++i)
    if (test(i)) return false;
  return true;
}

void SlotBitmap::set_range(int begin, int end) {
  for (int i = begin; i < end; ++i)
    words_[static_cast<size_t>(i) >> 6] |= (uint64_t{1} << (i & 63));
}

void SlotBitmap::clear_range(int begin, int end) {
  for (int i = begin; i < end; ++i)
    words_[static_cast<size_t>(i) >> 6] &= ~(uint64_t{1} << (i & 63));
}

int SlotBitmap::count() const {
  int c = 0;
  for (uint64_t w : words_) c += std::popcount(w);
  return c;
}

namespace {

// dst = src >> k across word boundaries
void shift_right(const std::vector<uint64_t>& src, int k,
                 std::vector<uint64_t>& dst) {
  const size_t n = src.size();
  const size_t wk = static_cast<size_t>(k) >> 6;
  const int bk = k & 63;
  for (size_t i = 0; i < n; ++i) {
    uint64_t lo = i + wk < n ? src[i + wk] : 0;
    uint64_t hi = i + wk + 1 < n ? src[i + wk + 1] : 0;
    dst[i] = bk == 0 ? lo : (lo >> bk) | (hi << (64 - bk));
  }
}

int first_set_bit(const std::vector<uint64_t>& words) {
  for (size_t i = 0; i < words.size(); ++i)
    if (words[i]) return static_cast<int>(i * 64) + std::countr_zero(words[i]);
  return -1;
}

// First index where `width` consecutive free slots start, given the
// occupancy words; -1 if none.
int first_free_run_words(const std::vector<uint64_t>& occ, int bits,
                         int width) {
  if (width <= 0 || width > bits) return -1;
  std::vector<uint64_t> free(occ.size());
  for (size_t i = 0; i < occ.size(); ++i) free[i] = ~occ[i];
  int tail = bits & 63;
  if (tail) free.back() &= (uint64_t{1} << tail) - 1;
  std::vector<uint64_t> run = free, shifted(occ.size());
  for (int k = 1; k < width; ++k) {
    shift_right(free, k, shifted);
    for (size_t i = 0; i < run.size(); ++i) run[i] &= shifted[i];
  }
  int pos = first_set_bit(run);
  return (pos >= 0 && pos + width <= bits) ? pos : -1;
}

}  // namespace

int SlotBitmap::first_free_run(int width) const {
  return first_free_run_words(words_, bits_, width);
}

double sor(const LinkSpectrumState& ls, const SpectrumConfig& cfg) {
  return static_cast<double>(traffic_load(ls)) /
         (static_cast<double>(cfg.slots_per_core) * cfg.cores);
}

int traffic_load(const LinkSpectrumState& ls) {
  int total = 0;
  for (int c : ls.occupied_per_core) total += c;
  return total;
}

NetworkState::NetworkState(const Topology& t, const SpectrumConfig& cfg)
    : topo_(&t), cfg_(cfg) {
  if (cfg_.cores < 1 || cfg_.slots_per_core < 1 || cfg_.guard_slots < 0)
    throw std::invalid_argument("bad spectrum config");
  LinkSpectrumState proto;
  proto.core_occ.assign(static_cast<size_t>(cfg_.cores),
                        SlotBitmap(cfg_.slots_per_core));
  proto.occupied_per_core.assign(static_cast<size_t>(cfg_.cores), 0);
  states_.assign(static_cast<size_t>(2 * t.link_count()), proto);
}

int NetworkState::directed_index(LinkId l, NodeId from) const {
  const Link& link = topo_->link(l);
  return 2 * l + (from == link.u ? 0 : 1);
}

std::optional<int> NetworkState::find_first_fit(const Path& p, int core,
                                                int data_slots) const {
  const int S = cfg_.slots_per_core, g = cfg_.guard_slots;
  if (data_slots <= 0 || data_slots > S || p.links.empty())
    return std::nullopt;

  // Union of occupancy along the path (the window must be free everywhere).
  static thread_local std::vector<uint64_t> occ;
  const size_t words = static_cast<size_t>((S + 63) / 64);
  occ.assign(words, 0);
  for (size_t i = 0; i < p.links.size(); ++i) {
    int idx = directed_index(p.links[i], p.nodes[i]);
    const SlotBitmap& bm = states_[static_cast<size_t>(idx)]
                               .core_occ[static_cast<size_t>(core)];
    for (size_t w = 0; w < words; ++w) occ[w] |= bm.words()[w];
  }

  int pos = first_free_run_words(occ, S, data_slots + g);
  if (pos >= 0) return pos;
  if (g > 0) {
    // A window ending exactly at the spectrum edge needs no guard.
    bool tail_free = true;
    for (int s = S - data_slots; s < S && tail_free; ++s)
      tail_free = !((occ[static_cast<size_t>(s) >> 6] >> (s & 63)) & 1u);
    if (tail_free) return S - data_slots;
  }
  return std::nullopt;
}

const Allocation& NetworkState::allocate(const Path& p, int core,
                                         int start_slot, int data_slots,
                                         double expiry_time,
                                         int64_t lightpath_id, bool counted) {
  const int S = cfg_.slots_per_core, g = cfg_.guard_slots;
  if (ledger_.count(lightpath_id))
    throw std::logic_error("duplicate lightpath id");
  int guard_used = (start_slot + data_slots == S) ? 0 : g;
  int end = start_slot + data_slots + guard_used;
  if (start_slot < 0 || end > S) throw std::logic_error("window out of range");

  Allocation a;
  a.lightpath_id = lightpath_id;
  a.core = core;
  a.start_slot = start_slot;
  a.data_slots = data_slots;
  a.guard_slots_used = guard_used;
  a.expiry_time = expiry_time;
  a.counted = counted;
  for (size_t i = 0; i < p.links.size(); ++i)
    a.directed_links.push_back(directed_index(p.links[i], p.nodes[i]));

  for (int idx : a.directed_links) {
    const SlotBitmap& bm = states_[static_cast<size_t>(idx)]
                               .core_occ[static_cast<size_t>(core)];
    if (!bm.range_free(start_slot, end))
      throw std::logic_error("spectrum conflict on directed link " +
                             std::to_string(idx));
  }
  mark(a, true);
  return ledger_.emplace(lightpath_id, std::move(a)).first->second;
}

Allocation NetworkState::release(int64_t lightpath_id) {
  auto it = ledger_.find(lightpath_id);
  if (it == ledger_.end())
    throw std::logic_error("release of unknown lightpath " +
                           std::to_string(lightpath_id));
  Allocation a = std::move(it->second);
  ledger_.erase(it);
  mark(a, false);
  return a;
}

void NetworkState::mark(const Allocation& a, bool occupy) {
  int end = a.start_slot + a.data_slots + a.guard_slots_used;
  int width = end - a.start_slot;
  for (int idx : a.directed_links) {
    LinkSpectrumState& ls = states_[static_cast<size_t>(idx)];
    SlotBitmap& bm = ls.core_occ[static_cast<size_t>(a.core)];
    if (occupy)
      bm.set_range(a.start_slot, end);
    else
      bm.clear_range(a.start_slot, end);
    ls.occupied_per_core[static_cast<size_t>(a.core)] += occupy ? width : -width;
  }
}

int64_t NetworkState::total_occupied_slots() const {
  int64_t total = 0;
  for (const LinkSpectrumState& ls : states_) total += traffic_load(ls);
  return total;
}

std::string NetworkState::dump() const {
  std::ostringstream os;
  for (int idx = 0; idx < directed_count(); ++idx) {
    const Link& l = topo_->link(idx / 2);
    NodeId from = (idx % 2 == 0) ? l.u : l.v;
    NodeId to = l.other(from);
    const LinkSpectrumState& ls = states_[static_cast<size_t>(idx)];
    for (int c = 0; c < cfg_.cores; ++c) {
      os << from << ">" << to << " c" << c << " ";
      const SlotBitmap& bm = ls.core_occ[static_cast<size_t>(c)];
      for (int s = 0; s < cfg_.slots_per_core; ++s) os << (bm.test(s) ? '1' : '0');
      os << "\n";
    }
  }
  return os.str();
}

void NetworkState::verify_invariants() const {
  int64_t from_bitmaps = 0;
  for (const LinkSpectrumState& ls : states_) {
    for (size_t c = 0; c < ls.core_occ.size(); ++c) {
      int pc = ls.core_occ[c].count();
      if (pc != ls.occupied_per_core[c])
        throw std::logic_error("popcount ledger drift");
      from_bitmaps += pc;
    }
  }
  int64_t from_ledger = 0;
  for (const auto& [id, a] : ledger_)
    from_ledger += static_cast<int64_t>(a.data_slots + a.guard_slots_used) *
                   static_cast<int64_t>(a.directed_links.size());
  if (from_bitmaps != from_ledger)
    throw std::logic_error("slot conservation violated: bitmaps " +
                           std::to_string(from_bitmaps) + " vs ledger " +
                           std::to_string(from_ledger));
}

}  // namespace sdmsim
