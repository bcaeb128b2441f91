// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "tofpr/pipeline.hpp"
#include "tofpr/scene.hpp"

namespace tofpr {

/// A full run description parsed from a config file: acquisition, pulse,
/// scene and run settings. Physical quantities in the file carry units in
/// their key names (delta_ps, sigma_ps, t0_frac, ...).
struct RunSpec {
    RunConfig config;
    Scene scene;
};

/// Parses a sectioned key-value config file. Missing [acquisition] values
/// fall back to the experiment preset; [scene] supports kinds flat, placard
/// and files. Throws ConfigError with the offending key on malformed input.
RunSpec load_run_spec(const std::string& path);
RunSpec parse_run_spec(const KeyValueDocument& doc);

/// The default config document (experiment preset + placard scene), used by
/// `tof run --write-default-config`.
std::string default_config_text();

} // namespace tofpr
