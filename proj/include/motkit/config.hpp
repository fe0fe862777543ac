#pragma once

#include <string>

#include "motkit/cmc.hpp"
#include "motkit/tracker.hpp"

namespace motkit {

/// Every tunable of the pipeline with its stock defaults. Loaded from a flat
/// `key=value` text file; unknown keys and out-of-range values raise
/// ConfigInvalid naming the offending key.
struct RunConfig {
    TrackerConfig tracker;      // nests association, appearance and motion configs
    CmcConfig cmc;
    int interpolation_max_gap = 20;
};

/// Applies one `key=value` override. Throws ConfigInvalid for unknown keys or
/// unparseable values (range checks happen in validate_config so that related
/// keys can be checked together).
void apply_config_override(RunConfig& cfg, const std::string& key, const std::string& value);

/// Range-checks every field; throws ConfigInvalid naming the bad key.
void validate_config(const RunConfig& cfg);

/// Parses a key=value file ('#' starts a comment, blank lines ignored) on top
/// of the defaults, then validates.
RunConfig load_run_config(const std::string& path);

/// One key=value line per field, fixed order, suitable for byte-exact diffs
/// against a hand-written config file.
std::string format_run_config(const RunConfig& cfg);

}  // namespace motkit
