#include "sdmsim/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdmsim {

ModulationTable ModulationTable::default_table() {
  return ModulationTable({
      {"DP-BPSK", 1, 25.0, 8000.0},
      {"DP-QPSK", 2, 50.0, 4000.0},
      {"DP-8QAM", 3, 75.0, 2000.0},
      {"DP-16QAM", 4, 100.0, 1000.0},
      {"DP-32QAM", 5, 125.0, 500.0},
      {"DP-64QAM", 6, 150.0, 250.0},
  });
}

ModulationTable::ModulationTable(std::vector<ModulationEntry> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("empty modulation table");
  for (const ModulationEntry& e : entries_)
    if (e.bits_per_symbol < 1 || e.max_reach_km <= 0.0)
      throw std::invalid_argument("bad modulation entry " + e.name);
  std::sort(entries_.begin(), entries_.end(),
            [](const ModulationEntry& a, const ModulationEntry& b) {
              return a.max_reach_km < b.max_reach_km;
            });
}

std::optional<ModulationEntry> ModulationTable::select(double path_km) const {
  // Most spectrally efficient format whose reach covers the path.
  const ModulationEntry* best = nullptr;
  for (const ModulationEntry& e : entries_) {
    if (path_km > e.max_reach_km) continue;
    if (!best || e.bits_per_symbol > best->bits_per_symbol) best = &e;
  }
  if (!best) return std::nullopt;
  return *best;
}

int required_slots(double bandwidth_gbps, int bits_per_symbol,
                   const SpectrumConfig& cfg) {
  double per_slot = 2.0 * cfg.slot_bandwidth_ghz * bits_per_symbol;
  return static_cast<int>(std::ceil(bandwidth_gbps / per_slot));
}

}  // namespace sdmsim
