// edgesar: command-line driver for the online edge-mapping pipeline.

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "edgesar/config.hpp"
#include "edgesar/dictionary.hpp"
#include "edgesar/errors.hpp"
#include "edgesar/pipeline.hpp"
#include "edgesar/verify.hpp"

namespace fs = std::filesystem;
using namespace edgesar;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfig = 2,
  kIo = 3,
  kNumerical = 4,
};

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
  std::optional<std::size_t> checkpoint_every;
  std::string resume;
  std::string out;
  std::vector<std::string> overrides;
};

ExperimentConfig resolve_config(const CommonFlags& flags) {
  nlohmann::json doc = flags.config.empty() ? nlohmann::json::object()
                                            : load_config_json(flags.config);
  for (const auto& o : flags.overrides) apply_override(doc, o);
  if (flags.seed) doc["seed"] = *flags.seed;
  if (flags.deterministic) doc["deterministic"] = true;
  if (flags.checkpoint_every) doc["checkpoint_every"] = *flags.checkpoint_every;
  if (!flags.out.empty()) doc["output_dir"] = flags.out;
  return parse_config(doc);
}

void print_summary(const RunSummary& s, const ExperimentConfig& cfg) {
  std::cout << "processed " << s.pulses_processed << " pulses (" << s.total_pulses
            << " total)\n";
  if (!s.metrics.rows.empty()) {
    const auto& r = s.metrics.rows.back();
    std::cout << std::setprecision(6) << "final objective " << r.objective << ", nonzeros "
              << r.nonzeros << ", relative edge-map error " << r.relative_error
              << ", precision " << r.precision << ", recall " << r.recall << '\n';
  }
  std::cout << "artifacts in " << cfg.output_dir.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online compressive edge mapping for monostatic SAR"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto add_common = [&flags](CLI::App* sub) {
    sub->add_option("--config", flags.config, "Experiment configuration (JSON)");
    sub->add_option("--seed", flags.seed, "Base random seed (pulse n uses seed + n)");
    sub->add_flag("--deterministic", flags.deterministic,
                  "Bit-reproducible mode (timings excluded from metrics.csv)");
    sub->add_option("--checkpoint-every", flags.checkpoint_every,
                    "Write checkpoint.bin every k pulses");
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--set", flags.overrides, "Override a config field: key.path=value");
  };

  auto* simulate = app.add_subcommand("simulate", "Simulate pulses into a binary dump");
  add_common(simulate);
  std::string dump_path;
  simulate->add_option("--pulses", dump_path, "Dump path (default <out>/pulses.bin)");

  auto* reconstruct = app.add_subcommand("reconstruct", "Stream a pulse dump through the solver");
  add_common(reconstruct);
  reconstruct->add_option("--pulses", dump_path, "Pulse dump to replay")->required();
  reconstruct->add_option("--resume", flags.resume, "Resume from a checkpoint");

  auto* run = app.add_subcommand("run", "Simulate and reconstruct end to end");
  add_common(run);
  run->add_option("--resume", flags.resume, "Resume from a checkpoint");
  std::optional<std::size_t> stop_after;
  run->add_option("--stop-after", stop_after, "Stop after this many pulses in total");

  auto* inspect = app.add_subcommand("inspect-dict", "Report on and export dictionary atoms");
  add_common(inspect);
  std::vector<std::size_t> atoms;
  inspect->add_option("--atom", atoms, "Atom index to export as raster (repeatable)");
  bool save_dict = false;
  inspect->add_flag("--save", save_dict, "Write the dictionary to <out>/dictionary.bin");
  bool coherence = false;
  inspect->add_flag("--coherence", coherence, "Compute the mutual coherence histogram");

  auto* verify = app.add_subcommand("verify", "Run the consistency checks on a configuration");
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    const ExperimentConfig cfg = resolve_config(flags);

    if (simulate->parsed()) {
      const fs::path path = dump_path.empty() ? cfg.output_dir / "pulses.bin" : fs::path(dump_path);
      const std::size_t n = simulate_to_dump(cfg, path);
      std::cout << "wrote " << n << " pulses to " << path.string() << '\n';
      return kOk;
    }
    if (reconstruct->parsed() || run->parsed()) {
      RunOptions opts;
      if (reconstruct->parsed()) opts.pulse_dump = fs::path(dump_path);
      if (!flags.resume.empty()) opts.resume = fs::path(flags.resume);
      opts.stop_after = stop_after;
      const RunSummary s = run_experiment(cfg, opts);
      print_summary(s, cfg);
      return kOk;
    }
    if (inspect->parsed()) {
      const EdgeletDictionary dict = build_edgelet_dictionary(cfg.make_grid(), cfg.dictionary);
      std::cout << "dictionary: " << dict.atoms.rows() << " pixels x " << dict.size()
                << " atoms\n";
      if (coherence && dict.size() >= 2) {
        const CoherenceReport rep = coherence_report(dict);
        std::cout << "max coherence " << rep.max_coherence << '\n';
        for (std::size_t b = 0; b < rep.counts.size(); ++b) {
          std::cout << "  [" << rep.bin_edges[b] << ", " << rep.bin_edges[b + 1]
                    << ") " << rep.counts[b] << '\n';
        }
      }
      fs::create_directories(cfg.output_dir);
      for (std::size_t k : atoms) {
        if (k >= dict.size()) throw ConfigError("--atom " + std::to_string(k) + " out of range");
        const RealVector atom = dict.atoms.col(static_cast<Eigen::Index>(k));
        const std::string stem = "atom_" + std::to_string(k);
        write_raster_csv(cfg.output_dir / (stem + ".csv"), dict.grid, atom);
        write_raster_binary(cfg.output_dir / (stem + ".bin"), dict.grid, atom);
        const auto& p = dict.params[k];
        std::cout << stem << ": centre (" << p.center.x() << ", " << p.center.y()
                  << ") m, orientation " << p.orientation << " rad, length " << p.length
                  << " m\n";
      }
      if (save_dict) save_dictionary(cfg.output_dir / "dictionary.bin", dict);
      return kOk;
    }
    if (verify->parsed()) {
      bool ok = true;
      for (const auto& r : verify_config(cfg)) {
        std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  (" << r.value
                  << " vs " << r.threshold << ")\n";
        ok = ok && r.passed;
      }
      return ok ? kOk : kNumerical;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const GeometryError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
