#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace linenet {

struct ReproduceOptions {
  long sim_epochs = 1'000'000;  // 0 disables the simulated column
  std::uint64_t seed = 1;
  std::uint64_t state_cap = 300'000;  // exact and bound columns left empty beyond this
};

std::vector<std::string> figure_catalogue();

// Writes the CSV for one figure. Throws ValidationError for an unknown id.
void reproduce(const std::string& figure_id, const ReproduceOptions& opts, std::ostream& out);

}  // namespace linenet
