// relnet: runs the pipeline stages over a corpus and writes tab-separated reports.
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relnet/pipeline.hpp"

namespace {

struct Options {
  std::string config_file;
  std::string out;
  std::string seed;
  int workers = 0;
  std::vector<std::string> overrides;
};

relnet::RunConfig make_config(const Options& o) {
  relnet::RunConfig c = o.config_file.empty() ? relnet::RunConfig() : relnet::RunConfig::from_file(o.config_file);
  for (const auto& kv : o.overrides) c.assign(kv);
  if (!o.out.empty()) c.set("out", o.out);
  if (!o.seed.empty()) c.set("seed", o.seed);
  if (o.workers > 0) c.set("workers", std::to_string(o.workers));
  c.seed();  // validates the value early
  return c;
}

void run(const std::string& stage, const relnet::RunConfig& c) {
  std::cerr << "[" << stage << "]\n";
  const auto r = relnet::run_stage(stage, c);
  for (const auto& line : r.summary) std::cout << stage << '\t' << line << '\n';
  for (const auto& p : r.outputs) std::cerr << "  wrote " << p << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relationship-labeled social network pipeline"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("-c,--config", opt.config_file, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("-o,--out", opt.out, "output directory (config key: out)");
  app.add_option("--seed", opt.seed, "random seed (config key: seed)");
  app.add_option("-j,--workers", opt.workers, "worker threads (config key: workers)")->check(CLI::PositiveNumber);
  app.add_option("-s,--set", opt.overrides, "override a config key, e.g. --set topics.k=50");

  bool show_config = false;
  for (const auto& name : relnet::stage_names()) app.add_subcommand(name, "run the " + name + " stage");
  auto* all = app.add_subcommand("all", "run every stage in order");
  auto* cfg = app.add_subcommand("config", "print the effective configuration");
  cfg->callback([&] { show_config = true; });
  app.fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto c = make_config(opt);
    if (show_config) {
      std::cout << c.header() << '\n' << c.dump();
      return 0;
    }
    if (all->parsed()) {
      for (const auto& stage : relnet::stage_names()) run(stage, c);
      return 0;
    }
    for (const auto* sub : app.get_subcommands()) run(sub->get_name(), c);
  } catch (const relnet::MissingArtifactError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const relnet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
