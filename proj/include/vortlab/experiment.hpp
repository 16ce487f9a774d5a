#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vortlab/config.hpp"

namespace vortlab {

enum class Stage { simulate = 0, localize, maximal, select, degiorgi, report };

const char* stage_name(Stage s);
Stage parse_stage(const std::string& name);

struct ArtifactRecord {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uint64_t bytes = 0;
};

struct StageRecord {
  std::string name;
  bool ok = false;
  std::string error;  // "code: context" when the stage failed
  std::vector<ArtifactRecord> outputs;
};

struct ExperimentResult {
  int exit_status = 0;
  std::string manifest_path;
  std::vector<StageRecord> stages;
};

// Runs every stage up to and including `last`, writing artifacts under cfg.output_dir and a
// manifest.json listing them with SHA-256 hashes. A failing stage ends the run with exit
// status 1 and a manifest carrying the failure record. The manifest holds no timings, so a
// fixed seed and config give a byte-identical manifest.
ExperimentResult run_experiment(const ExperimentConfig& cfg, Stage last = Stage::report);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

// 17 significant digits.
std::string format_real(double v);

}  // namespace vortlab
