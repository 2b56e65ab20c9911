// touchcs: command-line front end for the context-aware touch readout
// simulator. Exit codes: 0 success, 2 usage/config error, 3 runtime error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "touchcs/config.h"
#include "touchcs/csv.h"
#include "touchcs/detector.h"
#include "touchcs/error.h"
#include "touchcs/experiment.h"
#include "touchcs/frontend.h"
#include "touchcs/matrices.h"
#include "touchcs/pipeline.h"
#include "touchcs/scene.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> trials;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw touchcs::ConfigError("--config", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

touchcs::ExperimentConfig load_config(const GlobalOptions& g) {
  touchcs::ExperimentConfig cfg =
      touchcs::parse_config(g.config_path.empty() ? "" : read_file(g.config_path));
  if (g.seed) cfg.seed = *g.seed;
  if (g.out) cfg.output_dir = *g.out;
  if (g.threads) cfg.threads = *g.threads;
  if (g.trials) cfg.trials = *g.trials;
  cfg.validate();
  return cfg;
}

std::string chunk_list(const std::vector<std::size_t>& chunks) {
  std::string s = "{";
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    s += (i ? ", " : "") + std::to_string(chunks[i] + 1);
  }
  return s + "}";
}

void report_files(const touchcs::ExperimentResult& result) {
  for (const auto& path : result.files) std::cout << "wrote " << path.string() << '\n';
  for (const auto& msg : result.skipped) std::cerr << "skipped: " << msg << '\n';
}

struct MatrixArgs {
  std::string scheme = "PHI_K";
  std::size_t m = 4, k = 2, l = 1, N = 0, n = 0;
  std::uint64_t seed = 1;
};

int gen_matrix(const MatrixArgs& a, const GlobalOptions& g) {
  using namespace touchcs;
  const Scheme scheme = parse_scheme(a.scheme);
  std::optional<TernaryMatrix> mat;
  switch (scheme) {
    case Scheme::kPhiK:
      mat = build_phi_k(a.m, a.k);
      break;
    case Scheme::kPhiKL: {
      MatrixParams p{a.m, a.k, a.l, a.N};
      if (p.N == 0) p.N = p.l * p.chunk_count();
      mat = build_phi_kl(p).matrix;
      break;
    }
    case Scheme::kTdm:
      mat = build_identity(a.n ? a.n : a.m);
      break;
    case Scheme::kCdm:
      mat = build_hadamard(a.n ? a.n : a.m);
      break;
    case Scheme::kBernoulli:
      mat = build_bernoulli(a.m, a.n ? a.n : a.m, g.seed.value_or(a.seed));
      break;
  }
  if (g.out) {
    std::ofstream out(*g.out);
    if (!out) throw std::runtime_error("cannot open " + *g.out + " for writing");
    write_triplets(out, *mat);
    if (!out) throw std::runtime_error("failed writing " + *g.out);
  } else {
    write_triplets(std::cout, *mat);
  }
  return 0;
}

int oracle(std::size_t m, std::size_t k, std::size_t l, double vth) {
  using namespace touchcs;
  MatrixParams p{m, k, l, 0};
  p.N = p.l * p.chunk_count();
  const double dcs[] = {0.0, 5.0};
  const ExactnessReport rep = check_noiseless_exactness(p, vth, dcs);
  std::cout << "m=" << m << " k=" << k << " l=" << l << " N=" << p.N
            << " vth=" << vth << ": checked " << rep.supports_checked
            << " supports (dc 0 and 5)\n";
  if (rep.failures == 0) {
    std::cout << "all " << k << "-sparse supports detected exactly\n";
    return 0;
  }
  std::cout << rep.failures << " supports misdetected, e.g.";
  for (const auto& s : rep.failing_supports) std::cout << ' ' << chunk_list(s);
  std::cout << '\n';
  return kExitRuntime;
}

struct DemoArgs {
  std::size_t m = 8, k = 2, l = 2, N = 0;
  double vth = 0.5;
  double snr_tsp = 30.0;
  double snr_ro = 40.0;
  double dc = 0.0;
  bool postprocess = false;
};

int demo(const DemoArgs& a, const GlobalOptions& g) {
  using namespace touchcs;
  MatrixParams p{a.m, a.k, a.l, a.N};
  if (p.N == 0) p.N = p.l * p.chunk_count();
  const RepeatedMatrix phi = build_phi_kl(p);
  SceneConfig scene{.sparsity_k = p.k, .snr_tsp_db = a.snr_tsp, .dc = a.dc};
  Rng rng(derive_seed(g.seed.value_or(1), 0xde30, 0));

  const TouchFrame frame = generate_frame(scene, phi.chunks, rng);
  const std::vector<double> sensed =
      apply_tsp_noise(frame, scene.snr_tsp_db, scene.amplitude, rng);
  ContextAwareSettings settings{.snr_readout_db = a.snr_ro, .vth = a.vth,
                                .detector = {.postprocess = a.postprocess},
                                .dc_baseline = a.dc};
  Rng readout = rng;
  const FrameOutcome out =
      run_context_aware_frame(phi, p, frame, sensed, settings, readout);

  // Replay the detection readout for display; same stream, same samples.
  Measurement meas = measure(phi.matrix, sensed, a.snr_ro, rng);
  subtract_dc_baseline(meas, phi.matrix.row_sums(), a.dc);
  const QuantizedMeasurement q = quantize(meas, a.vth);

  std::cout << "params: m=" << p.m << " k=" << p.k << " l=" << p.l << " N=" << p.N
            << " chunks=" << p.chunk_count()
            << " sampling_ratio=" << csv::format_double(p.sampling_ratio()) << '\n';
  std::cout << "truth chunks (1-based): " << chunk_list(out.truth_chunks) << '\n';
  std::cout << "x (sensor: value, noisy):";
  for (std::size_t i = 0; i < p.N; ++i) {
    std::printf(" %zu:%.3f", i + 1, sensed[i]);
  }
  std::cout << "\ny:";
  for (double y : meas.samples) std::printf(" %.3f", y);
  std::cout << "\ncodes (vth=" << a.vth << "):";
  for (Code c : q.codes) std::cout << ' ' << code_name(c);
  std::cout << "\nw chunks: " << chunk_list(out.detection->flagged_chunks()) << '\n';
  std::cout << "w sensors:";
  for (std::uint8_t f : out.detection->sensor_flags) std::cout << ' ' << int(f);
  const Score s = score(*out.detection, out.truth_chunks);
  std::cout << "\ntpr=" << s.tpr << " fpr=" << s.fpr
            << " measurements_used=" << out.measurements_used << " (TDM: " << p.N
            << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"touchcs: context-aware readout simulator for sparse touch arrays"};
  app.require_subcommand(1);

  GlobalOptions g;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t threads = 0;
  std::size_t trials = 0;
  app.add_option("--config", g.config_path, "Experiment config file");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides config)");
  auto* out_opt = app.add_option("--out", out, "Output directory (file for gen-matrix)");
  auto* threads_opt =
      app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  auto* trials_opt = app.add_option("--trials", trials, "Monte Carlo trials per point");
  app.fallthrough();

  MatrixArgs mat_args;
  auto* gen = app.add_subcommand("gen-matrix", "Write a sensing matrix as triplets");
  gen->add_option("--scheme", mat_args.scheme, "PHI_K, PHI_KL, TDM, CDM or BERNOULLI")
      ->check(CLI::IsMember({"PHI_K", "PHI_KL", "TDM", "CDM", "BERNOULLI"}));
  gen->add_option("--m", mat_args.m, "Measurements (rows)");
  gen->add_option("--k", mat_args.k, "Sparsity parameter");
  gen->add_option("--l", mat_args.l, "Columns per chunk (PHI_KL)");
  gen->add_option("--N", mat_args.N, "Sensors (PHI_KL; default l*(m+m/k))");
  gen->add_option("--n", mat_args.n, "Order / columns (TDM, CDM, BERNOULLI)");

  auto* roc = app.add_subcommand("roc", "Threshold sweep; writes roc.csv");
  auto* power = app.add_subcommand("power", "Energy-saving table; writes energy.csv");
  auto* run = app.add_subcommand("run", "Full campaign: roc.csv, energy.csv, manifest");

  std::size_t om = 8, ok = 2, ol = 2;
  double ovth = 0.5;
  auto* orc = app.add_subcommand("oracle", "Exhaustive noiseless detector check");
  orc->add_option("--m", om, "Measurements")->check(CLI::PositiveNumber);
  orc->add_option("--k", ok, "Sparsity parameter")->check(CLI::PositiveNumber);
  orc->add_option("--l", ol, "Columns per chunk")->check(CLI::PositiveNumber);
  orc->add_option("--vth", ovth, "Quantizer threshold");

  DemoArgs demo_args;
  auto* dem = app.add_subcommand("demo", "Trace one frame: x -> y -> codes -> w");
  dem->add_option("--m", demo_args.m, "Measurements");
  dem->add_option("--k", demo_args.k, "Sparsity parameter");
  dem->add_option("--l", demo_args.l, "Columns per chunk");
  dem->add_option("--N", demo_args.N, "Sensors (default l*(m+m/k))");
  dem->add_option("--vth", demo_args.vth, "Quantizer threshold");
  dem->add_option("--snr-tsp", demo_args.snr_tsp, "TSP SNR in dB");
  dem->add_option("--snr-ro", demo_args.snr_ro, "Readout SNR in dB");
  dem->add_option("--dc", demo_args.dc, "Common sensor DC");
  dem->add_flag("--postprocess", demo_args.postprocess, "Mixed-sign block filter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  if (*seed_opt) g.seed = seed;
  if (*out_opt) g.out = out;
  if (*threads_opt) g.threads = threads;
  if (*trials_opt) g.trials = trials;

  try {
    if (*gen) return gen_matrix(mat_args, g);
    if (*orc) return oracle(om, ok, ol, ovth);
    if (*dem) return demo(demo_args, g);
    const touchcs::ExperimentConfig cfg = load_config(g);
    touchcs::RunParts parts = touchcs::RunParts::kAll;
    if (*roc) parts = touchcs::RunParts::kRocOnly;
    if (*power) parts = touchcs::RunParts::kEnergyOnly;
    (void)run;
    report_files(touchcs::run_experiment(cfg, parts));
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
