// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0
//
// Subcommand bodies. Each returns a process exit code and never throws:
// 0 success, 2 unreadable or malformed input, 3 semantic or validation error.
// Results go to `out`, diagnostics to `err`.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sr/cli/config.hpp"
#include "sr/tensor.hpp"

namespace sr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitSemantic = 3;

int cmd_align(const std::filesystem::path& in_path, const std::filesystem::path& out_path,
              const RunConfig& cfg, std::ostream& out, std::ostream& err);

int cmd_route(const std::filesystem::path& bundle, const std::filesystem::path& vector_file,
              const RunConfig& cfg, std::ostream& out, std::ostream& err);

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int cmd_inspect(const std::filesystem::path& bundle, std::ostream& out, std::ostream& err);

// One token per non-blank line, comma separated, every line `width` values.
// Throws ParseError naming the offending line.
std::vector<Vector> read_vector_csv(const std::filesystem::path& path, std::size_t width);

}  // namespace sr
