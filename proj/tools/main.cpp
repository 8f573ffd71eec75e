#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kslab/error.hpp"
#include "kslab/run.hpp"

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

int fail(const char* kind, const std::string& message) {
  std::cerr << "{\"error\": \"" << kind << "\", \"message\": \"" << json_escape(message)
            << "\"}\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kslab: moderately interacting particle approximation of degenerate Keller-Segel"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir = "kslab_out";
  int workers = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;

  for (const auto& name : kslab::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--workers", workers, "worker threads (default: KSLAB_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { seed = s; seed_given = true; },
        "master seed, overrides the config");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string name = app.get_subcommands().front()->get_name();

  if (workers == 0) {
    workers = 1;
    if (const char* env = std::getenv("KSLAB_WORKERS")) {
      try {
        workers = std::stoi(env);
      } catch (const std::exception&) {
        return fail("config", "KSLAB_WORKERS must be a positive integer");
      }
      if (workers < 1) return fail("config", "KSLAB_WORKERS must be a positive integer");
    }
  }

  try {
    std::string text = "{}";
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) return fail("io", "cannot read " + config_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    kslab::RunConfig cfg = kslab::parse_config(text);
    if (seed_given) cfg.coupling.sim.seed = seed;
    kslab::run_subcommand(name, cfg, out_dir, workers, std::cerr);
  } catch (const kslab::ConfigError& e) {
    return fail("config", e.what());
  } catch (const kslab::IoError& e) {
    return fail("io", e.what());
  } catch (const kslab::StepSizeError& e) {
    return fail("step_size", e.what());
  } catch (const kslab::BlowUpError& e) {
    return fail("blow_up", e.what());
  } catch (const kslab::OutOfDomainError& e) {
    return fail("out_of_domain", e.what());
  } catch (const kslab::Error& e) {
    return fail("error", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
