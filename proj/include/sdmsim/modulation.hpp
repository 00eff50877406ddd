#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdmsim/spectrum.hpp"

namespace sdmsim {

struct ModulationEntry {
  std::string name;
  int bits_per_symbol;      // m
  double rate_gbps;         // per-slot line rate at this format
  double max_reach_km;      // inclusive bound
};

// Distance-adaptive format table, ordered by descending spectral efficiency.
class ModulationTable {
 public:
  static ModulationTable default_table();
  explicit ModulationTable(std::vector<ModulationEntry> entries);

  // Most efficient format whose reach covers the path, nullopt when the path
  // exceeds every reach (unreachable).
  std::optional<ModulationEntry> select(double path_km) const;

  const std::vector<ModulationEntry>& entries() const { return entries_; }

 private:
  std::vector<ModulationEntry> entries_;  // sorted by max_reach_km ascending
};

// Slot demand for a request: ceil(bandwidth / (2 * slot_bw * m)), the factor
// 2 accounting for dual polarization.
int required_slots(double bandwidth_gbps, int bits_per_symbol,
                   const SpectrumConfig& cfg);

}  // namespace sdmsim
