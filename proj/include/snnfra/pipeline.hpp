#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "snnfra/config.hpp"
#include "snnfra/error.hpp"

namespace snnfra {

enum class Stage { normalize, candidates, reduce, score, balance, train, evaluate, sweep };

std::string_view stage_name(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);

/// The stages `pipeline` runs, in order (sweep is separate).
const std::vector<Stage>& pipeline_stages();

struct ArtifactDigest {
  std::string name;    // logical input name or output file name
  std::string digest;  // 16 hex digits of FNV-1a over the file bytes
  friend bool operator==(const ArtifactDigest&, const ArtifactDigest&) = default;
};

/// Written next to a stage's outputs as manifest.json. Wall time goes to a
/// separate timing.txt so the manifest itself is reproducible.
struct StageManifest {
  std::string stage;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::vector<ArtifactDigest> inputs;
  std::vector<ArtifactDigest> outputs;

  std::string render() const;
  static StageManifest parse(const std::string& text);
};

std::string file_digest(const std::filesystem::path& path);

/// The config keys a stage depends on, in canonical form.
std::string stage_config_text(Stage stage, const RunConfig& config);

struct RunContext {
  RunConfig config;
  std::filesystem::path run_dir;
  bool force = false;
  std::ostream* log = nullptr;
};

struct StageOutcome {
  Stage stage;
  bool skipped = false;
  double seconds = 0.0;
};

/// Root of all run directories: $SNNFRA_RUN_ROOT, or "runs".
std::filesystem::path run_root();

/// `<root>/<run_name>` when a name is configured, else a fresh UTC timestamp
/// directory (suffixed on collision).
std::filesystem::path new_run_dir(const RunConfig& config);

/// Directory of an existing run: by name, else the lexicographically last
/// one under the root. Throws DependencyError if there is none.
std::filesystem::path existing_run_dir(const RunConfig& config);

/// Runs one stage unless its manifest shows identical inputs, config and
/// outputs. Outputs are staged in a scratch directory and moved into place
/// only on success. Throws DependencyError naming the upstream stage when
/// one of its artifacts is missing. Errors surface as StageFailure.
StageOutcome run_stage(Stage stage, const RunContext& context);

std::vector<StageOutcome> run_pipeline(const RunContext& context);

/// An error raised inside a stage, tagged with that stage.
class StageFailure : public Error {
 public:
  StageFailure(Stage stage, const Error& cause);
  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

/// Process exit status: 2 configuration, 3 ingest (normalize stage), 4 any
/// other stage failure.
int exit_code_for(const Error& error);

}  // namespace snnfra
