#pragma once

#include "glassfrac/scenarios.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace glassfrac {

std::string_view version();

struct OutputConfig {
    std::filesystem::path directory = "glassfrac-out";
    int snapshot_every = 25; // accepted steps between field snapshots; the final state is always written
};

/// Parsed `[section] key = value` run file.
struct RunConfig {
    FourPointScenario scenario;
    StaggeredConfig solver;
    OutputConfig output;
    int crack_count = 0; // evenly spaced over the half constant-moment region when no positions are listed
    std::map<std::string, std::map<std::string, std::string>> echo; // keys as read
};

/// Parses INI text; every violation is collected into one ConfigError.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Shortest text that reads back to the same double.
std::string format_double(double value);

/// Writes through a sibling temporary file and renames it into place.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

std::string probes_csv(const std::vector<StepRecord>& steps);
/// Legacy-VTK ASCII unstructured grid with u, d on points and sigma_xx, psi_plus on cells.
std::string fields_vtk(const PlaneStressModel& model, const Vector& u, const Vector& d, const std::string& title);
std::string beam_fields_csv(const LayeredBeamModel& model, const Vector& u, const Vector& d);

struct RunOutcome {
    int exit_code = 0;
    SimulationResult result;
    std::vector<std::filesystem::path> files; // relative to the output directory, manifest excluded
};

/// Builds the scenario, runs it and writes probes.csv, snapshots and manifest.json.
/// Config errors propagate as ConfigError; solver failures return exit code 2.
RunOutcome execute_run(const RunConfig& config, std::ostream& log);

}  // namespace glassfrac
