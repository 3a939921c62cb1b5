// scaqfp: stochastic-computing block simulator and AQFP elaboration tool.
//
// Subcommands:
//   table      Monte Carlo accuracy table for one block kind (CSV)
//   network    stochastic forward pass of a layered network vs float oracle
//   elaborate  block -> splitter/buffer-inserted, phase-balanced netlist + report
//   synth      majority rewrite of a netlist JSON file
//   rng        RNG matrix diagnostics (bias, correlation, overlap) as CSV
//
// Exit codes: 0 ok, 1 usage/config error, 2 validation failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"
#include "scaqfp/aqfp.hpp"
#include "scaqfp/bitonic.hpp"
#include "scaqfp/blocks.hpp"
#include "scaqfp/experiments.hpp"
#include "scaqfp/network.hpp"
#include "scaqfp/prng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  return j;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

scaqfp::CellLibrary load_library(const std::string& path) {
  if (path.empty()) return scaqfp::CellLibrary{};
  return scaqfp::CellLibrary::from_json(load_json(path));
}

struct TableOptions {
  std::string block = "feature_extraction";
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> lengths = {128, 256, 512, 1024, 2048};
  std::size_t trials = 1000;
  std::size_t outputs = 10;
  double winner_low = 0.9;
  unsigned sng_bits = 10;
  uint64_t seed = 1;
  std::string config;
  std::string out;
};

int run_table(const TableOptions& opt) {
  scaqfp::ExperimentConfig cfg;
  cfg.kind = scaqfp::block_kind_from_name(opt.block);
  cfg.input_sizes = opt.sizes;
  cfg.stream_lengths = opt.lengths;
  cfg.trials = opt.trials;
  cfg.seed = opt.seed;
  cfg.sng_bits = opt.sng_bits;
  cfg.categorize_outputs = opt.outputs;
  cfg.winner_low = opt.winner_low;
  if (!opt.config.empty()) {
    const auto j = load_json(opt.config);
    if (j.contains("block")) cfg.kind = scaqfp::block_kind_from_name(j.at("block").get<std::string>());
    if (j.contains("sizes")) cfg.input_sizes = j.at("sizes").get<std::vector<std::size_t>>();
    if (j.contains("lengths")) cfg.stream_lengths = j.at("lengths").get<std::vector<std::size_t>>();
    cfg.trials = j.value("trials", cfg.trials);
    cfg.sng_bits = j.value("sng_bits", cfg.sng_bits);
    cfg.categorize_outputs = j.value("outputs", cfg.categorize_outputs);
    cfg.winner_low = j.value("winner_low", cfg.winner_low);
  }
  if (cfg.input_sizes.empty()) {
    cfg.input_sizes = cfg.kind == scaqfp::BlockKind::categorization
                          ? std::vector<std::size_t>{100, 200, 500, 800}
                      : cfg.kind == scaqfp::BlockKind::avg_pool
                          ? std::vector<std::size_t>{4, 9, 16, 25, 36}
                          : std::vector<std::size_t>{9, 25, 49, 81, 121};
  }
  write_output(opt.out, scaqfp::run_accuracy_table(cfg).to_csv());
  return kExitOk;
}

struct NetworkOptions {
  std::string spec_path;
  std::string weights_path;
  std::string inputs_path;
  std::size_t synthetic_count = 0;
  std::size_t height = 8, width = 8, channels = 1;
  double weight_scale = 0.5;
  uint64_t seed = 1;
  std::string out;
};

int run_network_cmd(const NetworkOptions& opt) {
  using namespace scaqfp;
  const NetworkSpec spec = NetworkSpec::from_json(load_json(opt.spec_path));

  WeightFile weights;
  if (!opt.weights_path.empty()) {
    weights = WeightFile::from_json(load_json(opt.weights_path));
  } else {
    weights = make_synthetic_weights(spec, opt.height, opt.width, opt.channels,
                                     derive_seed(opt.seed, 0x57), opt.weight_scale);
  }

  std::vector<Tensor> inputs;
  if (!opt.inputs_path.empty()) {
    for (const auto& t : load_json(opt.inputs_path).at("inputs")) {
      Tensor tensor;
      tensor.height = t.at("height").get<std::size_t>();
      tensor.width = t.at("width").get<std::size_t>();
      tensor.channels = t.at("channels").get<std::size_t>();
      tensor.values = t.at("values").get<std::vector<double>>();
      inputs.push_back(std::move(tensor));
    }
  } else {
    const std::size_t count = opt.synthetic_count == 0 ? 16 : opt.synthetic_count;
    inputs = make_synthetic_inputs(count, opt.height, opt.width, opt.channels,
                                   derive_seed(opt.seed, 0x49));
  }

  const NetworkResult sc = run_network(spec, weights, inputs, opt.seed);
  const NetworkResult ref = float_reference_forward(spec, weights, inputs);
  const NetworkResult sur = surrogate_forward(spec, weights, inputs);

  nlohmann::json j;
  j["images"] = nlohmann::json::array();
  std::size_t agree_ref = 0;
  std::size_t agree_sur = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    j["images"].push_back(nlohmann::json{{"scores", sc.scores[i]},
                                         {"top1", sc.top1[i]},
                                         {"float_scores", ref.scores[i]},
                                         {"float_top1", ref.top1[i]},
                                         {"surrogate_top1", sur.top1[i]}});
    if (sc.top1[i] == ref.top1[i]) ++agree_ref;
    if (sc.top1[i] == sur.top1[i]) ++agree_sur;
  }
  j["top1_agreement_float"] = static_cast<double>(agree_ref) / static_cast<double>(inputs.size());
  j["top1_agreement_surrogate"] =
      static_cast<double>(agree_sur) / static_cast<double>(inputs.size());
  write_output(opt.out, j.dump(2) + "\n");
  return kExitOk;
}

struct ElaborateOptions {
  std::string block = "feature_extraction";
  std::size_t inputs = 9;
  std::string netlist_path;
  std::string lib_path;
  uint64_t cycles = 1024;
  bool calibrate = false;
  std::string out;
  std::string report_csv;
};

int run_elaborate(const ElaborateOptions& opt) {
  using namespace scaqfp;
  CellLibrary lib = load_library(opt.lib_path);
  if (opt.calibrate) lib.e_jj = fit_e_jj(lib);

  GateNetlist net;
  std::string label = opt.block;
  if (!opt.netlist_path.empty()) {
    net = netlist_from_json(load_json(opt.netlist_path));
    label = opt.netlist_path;
  } else {
    net = build_block_netlist(block_kind_from_name(opt.block), opt.inputs);
  }

  const PhasedNetlist phased = elaborate(net, lib);
  const EnergyReport rep = report(phased, lib, opt.cycles);

  nlohmann::json j = netlist_to_json(phased.net, &phased.phase);
  j["depth"] = phased.depth;
  j["max_loop_phases"] = phased.max_loop_phases;
  j["report"] = rep.to_json();
  write_output(opt.out, j.dump(2) + "\n");

  if (!opt.report_csv.empty()) {
    std::ostringstream csv;
    csv << "block,inputs,cycles,jj_total,phase_depth,latency_ns,energy_units\n";
    csv << label << "," << opt.inputs << "," << opt.cycles << "," << rep.jj_total << ","
        << rep.phase_depth << "," << format_csv_value(rep.latency_s * 1e9) << ","
        << format_csv_value(rep.energy_total) << "\n";
    write_output(opt.report_csv, csv.str());
  }
  return kExitOk;
}

struct SynthOptions {
  std::string netlist_path;
  std::string lib_path;
  std::string out;
};

int run_synth(const SynthOptions& opt) {
  using namespace scaqfp;
  const CellLibrary lib = load_library(opt.lib_path);
  const GateNetlist net = netlist_from_json(load_json(opt.netlist_path));
  const GateNetlist rewritten = majority_rewrite(net);
  const EquivalenceResult eq = equivalence_check(net, rewritten);
  if (!eq.equivalent) throw ValidationError("majority rewrite changed the function");

  nlohmann::json j = netlist_to_json(rewritten);
  j["jj_before"] = lib.jj_total(net);
  j["jj_after"] = lib.jj_total(rewritten);
  write_output(opt.out, j.dump(2) + "\n");
  return kExitOk;
}

struct RngOptions {
  std::size_t size = 5;
  std::size_t cycles = 100000;
  uint64_t seed = 1;
  std::string out;
};

int run_rng(const RngOptions& opt) {
  const scaqfp::RngDiagnostics diag = scaqfp::rng_diagnostics(opt.size, opt.cycles, opt.seed);
  if (diag.degenerate) {
    std::cerr << "warning: size-1 matrix is degenerate (all four lines identical)\n";
  }
  write_output(opt.out, diag.to_csv());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic-computing DNN blocks on AQFP: simulation and elaboration"};
  app.require_subcommand(1);

  TableOptions table_opt;
  auto* table = app.add_subcommand("table", "Monte Carlo accuracy table for one block kind");
  table->add_option("--block", table_opt.block, "feature_extraction | avg_pool | categorization");
  table->add_option("--sizes", table_opt.sizes, "input sizes M");
  table->add_option("--lengths", table_opt.lengths, "bit-stream lengths N");
  table->add_option("--trials", table_opt.trials, "trials per cell");
  table->add_option("--outputs", table_opt.outputs, "categorization class count");
  table->add_option("--winner-low", table_opt.winner_low, "winner product lower bound");
  table->add_option("--sng-bits", table_opt.sng_bits, "SNG resolution");
  table->add_option("--seed", table_opt.seed, "master seed");
  table->add_option("--config", table_opt.config, "JSON config file");
  table->add_option("--out", table_opt.out, "output CSV path (stdout if omitted)");

  NetworkOptions net_opt;
  auto* network = app.add_subcommand("network", "run a layered network in the SC domain");
  network->add_option("--spec", net_opt.spec_path, "network spec JSON")->required();
  network->add_option("--weights", net_opt.weights_path, "weight file JSON");
  network->add_option("--inputs", net_opt.inputs_path, "input tensors JSON");
  network->add_option("--synthetic", net_opt.synthetic_count, "generate this many random inputs");
  network->add_option("--height", net_opt.height, "synthetic input height");
  network->add_option("--width", net_opt.width, "synthetic input width");
  network->add_option("--channels", net_opt.channels, "synthetic input channels");
  network->add_option("--weight-scale", net_opt.weight_scale, "synthetic weight scale");
  network->add_option("--seed", net_opt.seed, "master seed");
  network->add_option("--out", net_opt.out, "output JSON path");

  ElaborateOptions elab_opt;
  auto* elaborate = app.add_subcommand("elaborate", "elaborate a block into a phased netlist");
  elaborate->add_option("--block", elab_opt.block, "block kind (ignored with --netlist)");
  elaborate->add_option("--inputs", elab_opt.inputs, "block input size M");
  elaborate->add_option("--netlist", elab_opt.netlist_path, "elaborate this netlist JSON instead");
  elaborate->add_option("--lib", elab_opt.lib_path, "cell library JSON");
  elaborate->add_option("--cycles", elab_opt.cycles, "stream bits for the energy report");
  elaborate->add_flag("--calibrate", elab_opt.calibrate, "fit e_jj to the reference SNG energy");
  elaborate->add_option("--out", elab_opt.out, "output JSON path");
  elaborate->add_option("--report-csv", elab_opt.report_csv, "also write a CSV report");

  SynthOptions synth_opt;
  auto* synth = app.add_subcommand("synth", "majority-rewrite a netlist JSON");
  synth->add_option("--netlist", synth_opt.netlist_path, "netlist JSON")->required();
  synth->add_option("--lib", synth_opt.lib_path, "cell library JSON");
  synth->add_option("--out", synth_opt.out, "output JSON path");

  RngOptions rng_opt;
  auto* rng = app.add_subcommand("rng", "RNG matrix diagnostics CSV");
  rng->add_option("--size", rng_opt.size, "matrix dimension N");
  rng->add_option("--cycles", rng_opt.cycles, "steps to sample");
  rng->add_option("--seed", rng_opt.seed, "master seed");
  rng->add_option("--out", rng_opt.out, "output CSV path");

  try {
    app.parse(argc, argv);
    if (table->parsed()) return run_table(table_opt);
    if (network->parsed()) return run_network_cmd(net_opt);
    if (elaborate->parsed()) return run_elaborate(elab_opt);
    if (synth->parsed()) return run_synth(synth_opt);
    if (rng->parsed()) return run_rng(rng_opt);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const scaqfp::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
