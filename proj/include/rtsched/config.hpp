#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "rtsched/datagen.hpp"
#include "rtsched/simulator.hpp"
#include "rtsched/stats.hpp"

namespace rtsched {

/// Settings of a run. Every field has a default; a config file overrides some.
struct RunConfig {
  GeneratorConfig generator;
  SimulationOptions simulation;
  PolicyConfig policy;
  MarkOptions marks;
};

/// Parses `key = value` lines. `#` starts a comment; blank lines are ignored.
/// Throws ParseError on malformed lines, unknown keys or bad values.
RunConfig read_config(std::istream& in, const std::string& source = "<config>",
                      RunConfig base = {});
RunConfig load_config(const std::string& path);

/// Every recognized key with a one-line description, in file order.
const std::map<std::string, std::string>& config_keys();

}  // namespace rtsched
