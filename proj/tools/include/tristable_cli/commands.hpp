#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "tristable/error.hpp"
#include "tristable_cli/config.hpp"

namespace tristable::cli {

enum ExitCode : int { kOk = 0, kUnexpected = 1, kUsage = 2, kNumeric = 3, kThreshold = 4 };

/// ConfigError -> kUsage, IoError -> kUnexpected, everything else -> kNumeric.
int exit_code_for(const Error& e) noexcept;

struct Invocation {
    RunConfig cfg;
    std::filesystem::path out;
    std::ostream* log = nullptr;  // progress and wall-clock notes; nullptr silences
};

int cmd_landscape(const Invocation& inv, std::ostream& report);
int cmd_frequency(const Invocation& inv);
int cmd_spd(const Invocation& inv);
int cmd_simulate(const Invocation& inv);
int cmd_psd(const Invocation& inv);
int cmd_cr_sweep(const Invocation& inv);
int cmd_compare(const Invocation& inv, std::ostream& report);

}  // namespace tristable::cli
