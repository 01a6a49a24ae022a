/*! @file ringfill.cpp
 *  @brief Batch front end: completion runs, synthetic benchmarks, image
 *         inpainting, and metric evaluation.
 *
 *  Exit codes: 0 success, 2 usage error, 1 runtime error. Results go to
 *  standard output as key=value lines; bulk data goes to files.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ringfill/ringfill.hpp"

namespace {

using namespace ringfill;

//! Bad flag values discovered after CLI11 parsing (exit code 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t parse_rank_value(const std::string& token) {
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(token, &used, 10);
  } catch (const std::exception&) {
    throw UsageError("invalid rank \"" + token + "\"");
  }
  if (used != token.size() || v == 0) throw UsageError("invalid rank \"" + token + "\"");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

//! Comma list (one rank per mode) or a single value replicated to the order.
std::vector<std::size_t> parse_mode_ranks(const std::string& text, std::size_t order) {
  std::vector<std::size_t> ranks;
  for (const std::string& token : split(text, ',')) ranks.push_back(parse_rank_value(token));
  if (ranks.size() == 1) ranks.assign(order, ranks[0]);
  if (ranks.size() != order)
    throw UsageError("--ranks lists " + std::to_string(ranks.size()) + " values for an order-" +
                     std::to_string(order) + " tensor");
  return ranks;
}

//! Benchmark rank set: single value, comma list, or inclusive range "a:b".
std::vector<std::size_t> parse_rank_set(const std::string& text) {
  std::vector<std::size_t> set;
  if (text.find(':') != std::string::npos) {
    const std::vector<std::string> parts = split(text, ':');
    if (parts.size() != 2) throw UsageError("rank range must look like a:b");
    const std::uint64_t lo = parse_rank_value(parts[0]);
    const std::uint64_t hi = parse_rank_value(parts[1]);
    if (lo > hi) throw UsageError("rank range must be ascending");
    for (std::uint64_t r = lo; r <= hi; ++r) set.push_back(static_cast<std::size_t>(r));
  } else {
    for (const std::string& token : split(text, ',')) set.push_back(parse_rank_value(token));
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
  }
  return set;
}

Shape parse_shape(const std::string& text) {
  Shape shape;
  for (const std::string& token : split(text, ',')) {
    const std::uint64_t v = parse_rank_value(token);
    shape.push_back(static_cast<std::size_t>(v));
  }
  if (shape.size() < 3) throw UsageError("--shape needs at least 3 extents");
  return shape;
}

//! Flags shared by every solver-running subcommand.
struct SolverFlags {
  double lambda = 5.0;
  double mu0 = 1.0;
  double mu_max = 100.0;
  double rho = 1.01;
  double tol = 1e-6;
  std::size_t k_max = 300;
  std::uint64_t seed = 0;
  std::string x_init = "zero";

  void attach(CLI::App* cmd) {
    cmd->add_option("--lambda", lambda, "fit-penalty weight");
    cmd->add_option("--mu0", mu0, "initial augmented-Lagrangian penalty");
    cmd->add_option("--mu-max", mu_max, "penalty ceiling");
    cmd->add_option("--rho", rho, "penalty growth per iteration");
    cmd->add_option("--tol", tol, "relative-change stopping threshold");
    cmd->add_option("--k-max", k_max, "iteration / sweep cap");
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--x-init", x_init, "start for missing entries: zero | observed-mean")
        ->check(CLI::IsMember({"zero", "observed-mean"}));
  }

  SolverConfig config(std::vector<std::size_t> ranks) const {
    SolverConfig cfg;
    cfg.ranks = std::move(ranks);
    cfg.lambda = lambda;
    cfg.mu0 = mu0;
    cfg.mu_max = mu_max;
    cfg.rho = rho;
    cfg.tol = tol;
    cfg.k_max = k_max;
    cfg.seed = seed;
    cfg.x_init = x_init == "observed-mean" ? XInit::ObservedMean : XInit::Zero;
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void check_algorithm(const std::string& name) {
  if (name != "trlrf" && name != "trals")
    throw UsageError("unknown algorithm \"" + name + "\" (expected trlrf or trals)");
}

//! Runs the selected algorithm on observed data + mask.
SolveResult run_solver(const std::string& algorithm, const DenseTensor& observed,
                       const ObservationMask& mask, const SolverConfig& cfg) {
  if (algorithm == "trlrf") return trlrf_solve(observed, mask, cfg);
  Rng rng(cfg.seed);
  return trals_solve(observed, mask, cfg.ranks, cfg.k_max, rng, cfg.tol);
}

//! Model fit on the observed set: ||P(T - Psi)||_F / ||P(T)||_F. The returned
//! X equals T there by construction, so the interesting residual is the
//! factors' one.
double rse_observed(const DenseTensor& t, const ObservationMask& mask, const TrFactors& g) {
  const DenseTensor psi = tr_full_contract(g);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t p = 0; p < t.size(); ++p) {
    if (!mask.is_observed(p)) continue;
    const double d = t[p] - psi[p];
    num += d * d;
    den += t[p] * t[p];
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

// ---------------------------------------------------------------------------
// complete: recover one tensor from a data file and a mask file.

struct CompleteOpts {
  std::string input;
  std::string mask;
  std::string ranks;
  std::string algorithm = "trlrf";
  std::string output;
  std::string history;
  SolverFlags solver;
};

int cmd_complete(const CompleteOpts& opt) {
  check_algorithm(opt.algorithm);
  const DenseTensor t = read_tensor(opt.input);
  const ObservationMask mask = read_mask(opt.mask);
  const SolverConfig cfg = opt.solver.config(parse_mode_ranks(opt.ranks, t.order()));

  const DenseTensor observed = project(t, mask, Selection::Observed);
  const auto start = std::chrono::steady_clock::now();
  const SolveResult result = run_solver(opt.algorithm, observed, mask, cfg);
  const double seconds = elapsed_seconds(start);

  if (!opt.output.empty()) write_tensor(result.x, opt.output);
  if (!opt.history.empty()) write_history_csv(result, opt.history);

  std::cout << "algorithm=" << opt.algorithm << '\n'
            << "rse_observed=" << csv_double(rse_observed(t, mask, result.factors)) << '\n'
            << "iterations=" << result.iterations << '\n'
            << "converged=" << (result.converged ? 1 : 0) << '\n'
            << "seconds=" << csv_double(seconds) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// synth: ground-truth benchmark sweeping algorithms x ranks x repeats.

struct SynthOpts {
  std::string shape;
  std::uint64_t true_rank = 6;
  double sigma = 0.5;
  double missing = 0.5;
  std::string ranks;
  std::string algorithms = "trlrf,trals";
  std::size_t repeats = 1;
  std::string out;
  SolverFlags solver;
};

int cmd_synth(const SynthOpts& opt) {
  const Shape shape = parse_shape(opt.shape);
  const std::vector<std::size_t> rank_set = parse_rank_set(opt.ranks);
  const std::vector<std::string> algorithms = split(opt.algorithms, ',');
  for (const std::string& a : algorithms) check_algorithm(a);
  if (opt.repeats == 0) throw UsageError("--repeats must be at least 1");
  if (!(opt.sigma > 0.0)) throw UsageError("--sigma must be positive");
  const std::vector<std::size_t> true_ranks(shape.size(),
                                            static_cast<std::size_t>(opt.true_rank));
  if (opt.true_rank == 0) throw UsageError("--true-rank must be at least 1");

  std::ofstream csv(opt.out, std::ios::trunc);
  if (!csv) throw std::runtime_error(opt.out + ": cannot open for writing");
  csv << "algorithm,rank,repeat,rse,iterations,seconds\n";

  const auto start = std::chrono::steady_clock::now();
  std::size_t rows = 0;
  for (std::size_t rep = 0; rep < opt.repeats; ++rep) {
    // Fresh ground truth and mask per repeat, shared across algorithms and
    // ranks so every column of the benchmark sees the same instances.
    Rng truth_rng(mix_seed(opt.solver.seed, 1, rep, 0));
    const TrFactors truth_factors = random_tr(shape, true_ranks, opt.sigma, truth_rng);
    const DenseTensor truth = tr_full_contract(truth_factors);
    Rng mask_rng(mix_seed(opt.solver.seed, 2, rep, 0));
    const ObservationMask mask = sample_mask(shape, opt.missing, mask_rng);
    const DenseTensor observed = project(truth, mask, Selection::Observed);

    for (const std::string& algorithm : algorithms) {
      const std::uint64_t alg_id = algorithm == "trlrf" ? 0 : 1;
      for (std::size_t rank : rank_set) {
        SolverFlags flags = opt.solver;
        flags.seed = mix_seed(opt.solver.seed, 3, rep, 2 * rank + alg_id);
        const SolverConfig cfg = flags.config(std::vector<std::size_t>(shape.size(), rank));

        const auto run_start = std::chrono::steady_clock::now();
        double run_rse = std::numeric_limits<double>::infinity();
        std::size_t iterations = 0;
        try {
          const SolveResult result = run_solver(algorithm, observed, mask, cfg);
          run_rse = rse(truth, result.x);
          iterations = result.iterations;
        } catch (const DivergenceError&) {
          // keep the row: an exploded run is a data point, not a crash
        }
        csv << algorithm << ',' << rank << ',' << rep + 1 << ',' << csv_double(run_rse) << ','
            << iterations << ',' << csv_double(elapsed_seconds(run_start)) << '\n';
        ++rows;
      }
    }
  }
  csv.flush();
  if (!csv) throw std::runtime_error(opt.out + ": write failed");

  std::cout << "rows=" << rows << '\n'
            << "out=" << opt.out << '\n'
            << "seconds=" << csv_double(elapsed_seconds(start)) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// image: mask a PPM image, complete it, write the result.

struct ImageOpts {
  std::string input;
  double missing = 0.5;
  std::string ranks;
  std::string algorithm = "trlrf";
  std::string out;
  std::string mask_out;
  std::string metrics;
  SolverFlags solver;
};

int cmd_image(const ImageOpts& opt) {
  check_algorithm(opt.algorithm);
  const DenseTensor img = read_ppm(opt.input);
  const SolverConfig base = opt.solver.config(parse_mode_ranks(opt.ranks, img.order()));

  Rng mask_rng(mix_seed(opt.solver.seed, 1, 0, 0));
  const ObservationMask mask = sample_mask(img.shape(), opt.missing, mask_rng);
  const DenseTensor observed = project(img, mask, Selection::Observed);

  SolverConfig cfg = base;
  cfg.seed = mix_seed(opt.solver.seed, 2, 0, 0);
  const auto start = std::chrono::steady_clock::now();
  const SolveResult result = run_solver(opt.algorithm, observed, mask, cfg);
  const double seconds = elapsed_seconds(start);

  write_ppm(result.x, opt.out);
  if (!opt.mask_out.empty()) write_mask(mask, opt.mask_out);

  const double image_rse = rse(img, result.x);
  const double image_psnr = psnr(img, result.x);
  if (!opt.metrics.empty()) {
    std::ofstream csv(opt.metrics, std::ios::trunc);
    if (!csv) throw std::runtime_error(opt.metrics + ": cannot open for writing");
    csv << "rse,psnr,iterations,seconds\n"
        << csv_double(image_rse) << ',' << csv_double(image_psnr) << ',' << result.iterations
        << ',' << csv_double(seconds) << '\n';
    if (!csv) throw std::runtime_error(opt.metrics + ": write failed");
  }

  std::cout << "rse=" << csv_double(image_rse) << '\n'
            << "psnr=" << csv_double(image_psnr) << '\n'
            << "iterations=" << result.iterations << '\n'
            << "seconds=" << csv_double(seconds) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// eval: metrics between two tensor files.

struct EvalOpts {
  std::string ref;
  std::string est;
  bool with_psnr = false;
};

int cmd_eval(const EvalOpts& opt) {
  const DenseTensor ref = read_tensor(opt.ref);
  const DenseTensor est = read_tensor(opt.est);
  std::cout << "rse=" << csv_double(rse(ref, est)) << '\n';
  if (opt.with_psnr) std::cout << "psnr=" << csv_double(psnr(ref, est)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor completion in the tensor-ring format"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  CompleteOpts complete;
  CLI::App* complete_cmd =
      app.add_subcommand("complete", "recover a tensor from data + mask files");
  complete_cmd->add_option("--input", complete.input, "tensor file with the (masked) data")
      ->required();
  complete_cmd->add_option("--mask", complete.mask, "mask file")->required();
  complete_cmd->add_option("--ranks", complete.ranks, "TR-ranks: comma list or single value")
      ->required();
  complete_cmd->add_option("--algorithm", complete.algorithm, "trlrf | trals")
      ->capture_default_str();
  complete_cmd->add_option("--output", complete.output, "recovered tensor file");
  complete_cmd->add_option("--history", complete.history, "per-iteration trace CSV");
  complete.solver.attach(complete_cmd);

  SynthOpts synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "benchmark on synthetic TR-structured data");
  synth_cmd->add_option("--shape", synth.shape, "tensor extents, comma list")->required();
  synth_cmd->add_option("--true-rank", synth.true_rank, "uniform TR-rank of the ground truth")
      ->capture_default_str();
  synth_cmd->add_option("--sigma", synth.sigma, "stddev of the ground-truth core entries")
      ->capture_default_str();
  synth_cmd->add_option("--missing", synth.missing, "missing rate in [0,1)")
      ->capture_default_str();
  synth_cmd->add_option("--ranks", synth.ranks, "solver ranks: value, list, or range a:b")
      ->required();
  synth_cmd->add_option("--algorithms", synth.algorithms, "comma list of algorithms to run")
      ->capture_default_str();
  synth_cmd->add_option("--repeats", synth.repeats, "independent instances per configuration")
      ->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "result CSV path")->required();
  synth.solver.attach(synth_cmd);

  ImageOpts image;
  CLI::App* image_cmd = app.add_subcommand("image", "mask and inpaint a PPM image");
  image_cmd->add_option("--input", image.input, "P6 PPM image")->required();
  image_cmd->add_option("--missing", image.missing, "missing rate in [0,1)")
      ->capture_default_str();
  image_cmd->add_option("--ranks", image.ranks, "TR-ranks: comma list or single value")
      ->required();
  image_cmd->add_option("--algorithm", image.algorithm, "trlrf | trals")->capture_default_str();
  image_cmd->add_option("--out", image.out, "recovered image path")->required();
  image_cmd->add_option("--mask-out", image.mask_out, "write the sampled mask here");
  image_cmd->add_option("--metrics", image.metrics, "write rse/psnr CSV here");
  image.solver.attach(image_cmd);

  EvalOpts eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "metrics between two tensor files");
  eval_cmd->add_option("--ref", eval.ref, "reference tensor file")->required();
  eval_cmd->add_option("--est", eval.est, "estimate tensor file")->required();
  eval_cmd->add_flag("--psnr", eval.with_psnr, "also print PSNR (0-255 scale data)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(complete_cmd)) return cmd_complete(complete);
    if (app.got_subcommand(synth_cmd)) return cmd_synth(synth);
    if (app.got_subcommand(image_cmd)) return cmd_image(image);
    if (app.got_subcommand(eval_cmd)) return cmd_eval(eval);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
