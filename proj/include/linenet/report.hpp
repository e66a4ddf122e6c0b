#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "linenet/allocate.hpp"
#include "linenet/amc.hpp"
#include "linenet/dbie.hpp"
#include "linenet/delay.hpp"
#include "linenet/model.hpp"
#include "linenet/netcod.hpp"
#include "linenet/rbie.hpp"
#include "linenet/sim.hpp"

namespace linenet {

using json = nlohmann::ordered_json;

std::string version();

// {"eps": [...], "buffers": [...]}; validated.
NetworkSpec spec_from_json(const json& j);
json to_json(const NetworkSpec& spec);
// Reads a file, or parses the argument itself when it starts with '{'.
NetworkSpec load_spec(const std::string& path_or_inline);

json to_json(const rbie::RateSolution& sol);
json mixture_to_json(const WideMixture& f);
json to_json(const dbie::DistSolution& sol);
json to_json(const delay::DelayProfile& p, bool with_pmf);
json to_json(const sim::SimStats& s);
json to_json(const netcod::NoFeedbackStats& s);
json to_json(const alloc::AllocationResult& r);
json to_json(const amc::BoundsResult& b);

// Columns delay_epochs, probability, cumulative.
void write_pmf_csv(std::ostream& os, const std::vector<double>& pmf);
// Columns k, mass; stops once the remaining mass is below tail.
void write_mixture_pmf_csv(std::ostream& os, const WideMixture& f, double tail = 1e-9);

}  // namespace linenet
