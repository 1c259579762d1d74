#pragma once

#include <string>

#include "specslice/config.hpp"
#include "specslice/error.hpp"

namespace specslice {

// A module error tagged with the workflow stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.code(), stage + ": " + cause.what()), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// Each command returns a JSON summary and writes its artifacts under
// config.out_dir. Logs go to stderr.
std::string cmd_restructure(const PipelineConfig& config);
std::string cmd_metrics(const PipelineConfig& config);
std::string cmd_gen(const PipelineConfig& config);
std::string cmd_oracle_compare(const PipelineConfig& config);
std::string cmd_expressive(const PipelineConfig& config);

// Dispatch by subcommand name.
std::string run_command(const std::string& command, const PipelineConfig& config);
// Applies per-command defaults (metrics scores every node), then config_text.
std::string run_command(const std::string& command, const std::string& config_text);

// FNV-1a 64-bit.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t hash = 0xcbf29ce484222325ULL);

}  // namespace specslice
