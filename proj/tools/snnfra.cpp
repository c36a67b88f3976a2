#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "snnfra/io.hpp"
#include "snnfra/parallel.hpp"
#include "snnfra/pipeline.hpp"
#include "snnfra/synthetic.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool force = false;
  int jobs = 0;
  std::string run;
  std::vector<std::string> sets;
  std::optional<double> tp, tq, beta;
  std::optional<std::size_t> adasyn_k;
  std::string thresholds;
  std::string sweep_param;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config,-c", o.config, "Run configuration (INI)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Override general.seed");
  cmd->add_flag("--force", o.force, "Rerun even when the stage manifest is current");
  cmd->add_option("--jobs,-j", o.jobs, "Worker threads (0: runtime default)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--run", o.run, "Run directory name under $SNNFRA_RUN_ROOT (default: runs)");
  cmd->add_option("--set", o.sets, "Config override section.key=value (repeatable)");
  cmd->add_flag("--quiet,-q", o.quiet, "No progress lines");
}

snnfra::RunConfig build_config(const Options& o) {
  snnfra::RunConfig cfg = snnfra::load_config(o.config);
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw snnfra::Error(snnfra::ErrorCode::ConfigError, "--set expects key=value, got '" + s + "'");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  if (o.seed) cfg.seed = *o.seed;
  if (!o.run.empty()) cfg.run_name = o.run;
  if (o.tp) cfg.t_p = *o.tp;
  if (o.tq) cfg.t_q = *o.tq;
  if (o.beta) cfg.adasyn_beta = *o.beta;
  if (o.adasyn_k) cfg.adasyn_k = *o.adasyn_k;
  if (!o.thresholds.empty()) cfg.set("evaluate.sweep_thresholds", o.thresholds);
  if (!o.sweep_param.empty()) cfg.set("evaluate.sweep_param", o.sweep_param);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"snnfra: drug-target interaction prediction with shared-neighbor candidate generation, "
               "fuzzy-rough scoring and balanced classification"};
  app.require_subcommand(1);
  Options o;

  auto* pipeline = app.add_subcommand("pipeline", "Run normalize through evaluate");
  add_common(pipeline, o);

  std::vector<std::pair<CLI::App*, snnfra::Stage>> stage_cmds;
  for (const char* name : {"normalize", "candidates", "reduce", "score", "balance", "train", "evaluate", "sweep"}) {
    const auto stage = *snnfra::parse_stage(name);
    auto* cmd = app.add_subcommand(name, "Run the " + std::string(name) + " stage");
    add_common(cmd, o);
    if (stage == snnfra::Stage::balance || stage == snnfra::Stage::sweep) {
      cmd->add_option("--tp", o.tp, "Promotion threshold");
      cmd->add_option("--tq", o.tq, "Retention threshold");
      cmd->add_option("--beta", o.beta, "ADASYN balance level");
      cmd->add_option("--adasyn-k", o.adasyn_k, "ADASYN neighbors");
    }
    if (stage == snnfra::Stage::sweep) {
      cmd->add_option("--thresholds", o.thresholds, "Comma-separated thresholds");
      cmd->add_option("--sweep-param", o.sweep_param, "tq or tp");
    }
    stage_cmds.emplace_back(cmd, stage);
  }

  snnfra::SyntheticSpec synth_spec;
  std::string synth_out = "fixture";
  std::uint64_t synth_config_seed = 42;
  auto* synth = app.add_subcommand("synth", "Write the planted-rule synthetic fixture");
  synth->add_option("--out,-o", synth_out, "Output directory");
  synth->add_option("--seed", synth_spec.seed, "Generator seed");
  synth->add_option("--config-seed", synth_config_seed, "general.seed written to the fixture config");
  synth->add_option("--drugs", synth_spec.drugs);
  synth->add_option("--targets", synth_spec.targets);
  synth->add_option("--interactions", synth_spec.interactions);
  synth->add_option("--noise", synth_spec.noise_fraction, "Share of interactions ignoring cluster compatibility");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      const auto data = snnfra::make_synthetic(synth_spec);
      snnfra::write_synthetic(data, synth_out, synth_config_seed);
      std::cout << synth_out << "\n";
      return 0;
    }

    snnfra::RunContext ctx;
    ctx.config = build_config(o);
    ctx.force = o.force;
    ctx.log = o.quiet ? nullptr : &std::cerr;
    snnfra::set_thread_count(o.jobs);

    if (pipeline->parsed()) {
      ctx.run_dir = snnfra::new_run_dir(ctx.config);
      snnfra::run_pipeline(ctx);
    } else {
      for (const auto& [cmd, stage] : stage_cmds) {
        if (!cmd->parsed()) continue;
        ctx.run_dir = stage == snnfra::Stage::normalize && ctx.config.run_name.empty()
                          ? snnfra::new_run_dir(ctx.config)
                          : snnfra::existing_run_dir(ctx.config);
        snnfra::run_stage(stage, ctx);
      }
    }
    std::cout << ctx.run_dir.string() << "\n";
    return 0;
  } catch (const snnfra::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return snnfra::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
