// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
//   lsm_acceptance --lsm-binary path/to/lsm --work-dir dir

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/SVD>

#include "lsm/commands.hpp"
#include "lsm/config.hpp"
#include "lsm/parallel.hpp"
#include "lsm/rng.hpp"
#include "lsm/sweep.hpp"

namespace fs = std::filesystem;
using namespace lsm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
};

// Criteria are checked in dependency order; some have several parts.
std::map<int, Criterion> results;

void run_criterion(int id, const std::string& name, const std::function<Outcome()>& fn) {
  std::cerr << "checking " << id << ". " << name << std::endl;
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
  auto& c = results[id];
  c.name = c.name.empty() ? name : c.name + " / " + name;
  c.pass = c.pass && o.pass;
  c.detail = c.detail.empty() ? o.detail : c.detail + "; " + o.detail;
  c.seconds += d.count();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream ss;
  ss.precision(digits);
  ss << v;
  return ss.str();
}

std::string pct(double error) { return fmt(100.0 * error, 4) + "%"; }

const SynapseOrder kOrders[] = {SynapseOrder::Delta, SynapseOrder::Zeroth, SynapseOrder::First,
                                SynapseOrder::Second};
const double kTaus[] = {1, 2, 4, 8, 16, 32, 50};

KernelSpec kernel_for(SynapseOrder order, double tau) { return timescale_kernel(KernelSpec{}, order, tau); }

std::vector<double> convolve(const std::vector<double>& x, const DiscreteKernel& k) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t t0 = 0; t0 < x.size(); ++t0) {
    if (x[t0] == 0.0) continue;
    for (std::size_t i = 0; i < k.samples.size() && t0 + k.delay_steps + i < x.size(); ++i) {
      out[t0 + k.delay_steps + i] += x[t0] * k.samples[i];
    }
  }
  return out;
}

int shell(const std::string& command) {
  const int status = std::system(command.c_str());
  return status;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

// Every regular file under dir, relative path -> contents.
std::vector<std::pair<std::string, std::string>> snapshot(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files.emplace_back(fs::relative(entry.path(), dir).string(), cli::read_file(entry.path()));
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

struct Benchmark {
  RunConfig config;
  Dataset data;
  Topology topology;
  unsigned threads;

  Benchmark() {
    config = parse_run_config(nlohmann::json::object());
    threads = default_thread_count();
    config.threads = threads;
    data = cli::resolve_dataset(config);
    topology = cli::resolve_topology(config);
  }

  Experiment experiment() const { return Experiment{data, topology}; }

  SweepConfig sweep(SynapseOrder order, double tau) const {
    SweepConfig s = config.sweep_config();
    s.kernel = timescale_kernel(s.kernel, order, tau);
    return s;
  }
};

bool interior(const std::vector<double>& values, double v) {
  return v != values.front() && v != values.back();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string lsm_binary;
  std::string work_dir = "acceptance_work";
  app.add_option("--lsm-binary", lsm_binary, "Path to the lsm executable")->required();
  app.add_option("--work-dir", work_dir, "Scratch directory");
  CLI11_PARSE(app, argc, argv);

  const fs::path work(work_dir);
  fs::remove_all(work);
  fs::create_directories(work);

  run_criterion(1, "kernel charge conservation", [] {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (auto order : kOrders) {
      for (double tau : kTaus) {
        const auto k = discretize_kernel(kernel_for(order, tau));
        double sum = 0.0;
        for (double s : k.samples) sum += s;
        worst = std::max(worst, std::abs(sum * k.dt_ms - 1.0));
      }
    }
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
    return Outcome{worst <= 1e-9 && d.count() < 1.0,
                   "max |charge-1| = " + fmt(worst) + " (<= 1e-9), " + fmt(d.count()) + " s (< 1 s)"};
  });

  run_criterion(2, "filter vs direct convolution", [] {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(derive_seed(2024, seed));
      std::vector<double> x(1000, 0.0);
      for (double& v : x) {
        const double u = rng.uniform();
        v = u < 0.1 ? 1.0 : (u < 0.2 ? -1.0 : 0.0);
      }
      for (auto order : kOrders) {
        for (double tau : kTaus) {
          if (order == SynapseOrder::Delta && tau != kTaus[0]) continue;
          const auto k = discretize_kernel(kernel_for(order, tau));
          const auto direct = convolve(x, k);
          SynapticFilter f(k);
          for (std::size_t t = 0; t < x.size(); ++t) {
            if (x[t] != 0.0) f.inject(x[t]);
            worst = std::max(worst, std::abs(f.step() - direct[t]));
          }
        }
      }
    }
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
    return Outcome{worst <= 1e-9 && d.count() < 10.0,
                   "max deviation " + fmt(worst) + " (<= 1e-9), " + fmt(d.count()) + " s (< 10 s)"};
  });

  run_criterion(4, "LIF decay step", [] {
    const double v = step_neuron(10.0, 0.0, LifParams{}, 0).v;
    double sub = 10.0;
    const double h = 0.001;
    for (int i = 0; i < 1000; ++i) {
      const double k1 = -sub / 64.0;
      const double k2 = -(sub + 0.5 * h * k1) / 64.0;
      const double k3 = -(sub + 0.5 * h * k2) / 64.0;
      const double k4 = -(sub + h * k3) / 64.0;
      sub += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    const bool ok = std::abs(v - 10.0 * std::exp(-1.0 / 64.0)) <= 1e-9 && std::abs(v - sub) <= 1e-9;
    return Outcome{ok, "v' = " + fmt(v, 10) + " mV, substep " + fmt(sub, 10) + " mV"};
  });

  run_criterion(5, "readout oracle on random instances", [] {
    ReadoutConfig c;
    c.ridge = 0.0;
    double worst = 0.0;
    double max_abs = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(derive_seed(55, seed));
      Eigen::MatrixXd r(20, 30);
      for (Eigen::Index j = 0; j < r.cols(); ++j) {
        for (Eigen::Index i = 0; i < r.rows(); ++i) r(i, j) = rng.uniform();
      }
      std::vector<int> labels(30);
      for (int j = 0; j < 30; ++j) labels[j] = j % 10;
      Eigen::MatrixXd y = Eigen::MatrixXd::Zero(10, 30);
      for (int j = 0; j < 30; ++j) y(labels[j], j) = 1.0;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Eigen::MatrixXd oracle = c.k * y * svd.solve(Eigen::MatrixXd::Identity(20, 20));
      const auto w = solve_readout(r, labels, c);
      worst = std::max(worst, (w - oracle).norm() / oracle.norm());
      const auto clipped = train_readout(r, labels, c);
      max_abs = std::max(max_abs, clipped.w.cwiseAbs().maxCoeff());
    }
    return Outcome{worst <= 1e-6 && max_abs <= 8.0,
                   "max relative deviation " + fmt(worst) + " (<= 1e-6), max |w| " + fmt(max_abs) + " (<= 8)"};
  });

  run_criterion(11, "cost table fidelity", [&] {
    const fs::path out = work / "cost";
    const fs::path stdout_file = work / "cost_stdout.txt";
    const int status = shell(quote(lsm_binary) + " cost --order zeroth -o " + quote(out) + " > " + quote(stdout_file));
    if (status != 0) return Outcome{false, "lsm cost exited with status " + std::to_string(status)};
    const auto j = nlohmann::json::parse(cli::read_file(out / "cost.json"));
    const auto text = cli::read_file(stdout_file);
    bool ok = j["benefit"][0]["power_ratio"] == 1000.0 && j["benefit"][0]["area_ratio"] == 100.0 &&
              j["benefit"][1]["power_ratio"] == 100.0 && j["benefit"][1]["area_ratio"] == 3.0;
    const auto& e = j["entries"];
    const auto& ref = j["reference_entries"];
    ok = ok && e[0]["power_nw"] == 100.0 && e[0]["area_um2"] == 10.0 && e[1]["power_nw"] == 5000.0 &&
         e[1]["area_um2"] == 500.0 && ref[0]["power_min_nw"] == 100000.0 && ref[0]["power_max_nw"] == 500000.0 &&
         ref[0]["area_um2"] == 1000.0 && ref[1]["power_nw"] == 500000.0 && ref[1]["area_um2"] == 1500.0;
    for (const char* needle : {"Power: 100-500 uW (static)", "Power: 100 nW (dynamic)", "Area: 1000 um^2",
                               "Area: 10 um^2", "Power: 500 uW", "Power: 5 uW", "Area: 1500 um^2",
                               "Area: 500 um^2", "1000x", "100x", "3x"}) {
      ok = ok && text.find(needle) != std::string::npos;
    }
    return Outcome{ok, "driver 1000x/100x, pulse generation 100x/3x"};
  });

  std::cerr << "building benchmark (" << default_thread_count() << " threads)" << std::endl;
  const Benchmark bench;
  const auto experiment = bench.experiment();

  run_criterion(6, "feedforward monotonicity", [&] {
    const ReservoirSimulator sim(bench.topology.graph, bench.topology.wiring, bench.config.kernel,
                                 bench.config.lif);
    double previous = -1.0;
    bool ok = true;
    std::string trace;
    for (int a = 0; a <= 20; ++a) {
      const auto records = simulate_dataset(sim, ScalingPoint{double(a), 0.0}, bench.data.samples, bench.threads);
      const double activity = reservoir_activity(records).spikes_per_sample;
      ok = ok && activity >= previous;
      previous = activity;
      if (a % 5 == 0) trace += (trace.empty() ? "" : ", ") + std::to_string(a) + ":" + fmt(activity);
    }
    return Outcome{ok, "spikes/sample at alpha_in " + trace};
  });

  // Full sweeps shared by criteria 3, 7-10.
  std::cerr << "sweeping delta, zeroth(1), zeroth(8), first(8), second(8/4)" << std::endl;
  const auto grid_delta = grid_sweep(experiment, bench.sweep(SynapseOrder::Delta, 1));
  const auto grid_zeroth1 = grid_sweep(experiment, bench.sweep(SynapseOrder::Zeroth, 1));
  const auto grid_zeroth = grid_sweep(experiment, bench.sweep(SynapseOrder::Zeroth, 8));
  const auto grid_first = grid_sweep(experiment, bench.sweep(SynapseOrder::First, 8));
  const auto grid_second = grid_sweep(experiment, bench.sweep(SynapseOrder::Second, 8));
  cli::write_file(work / "grids" / "delta.csv", grid_csv(grid_delta));
  cli::write_file(work / "grids" / "zeroth_tau1.csv", grid_csv(grid_zeroth1));
  cli::write_file(work / "grids" / "zeroth_tau8.csv", grid_csv(grid_zeroth));
  cli::write_file(work / "grids" / "first_tau8.csv", grid_csv(grid_first));
  cli::write_file(work / "grids" / "second_tau8.csv", grid_csv(grid_second));

  run_criterion(3, "delta is zeroth order with width dt", [&] {
    const ReservoirSimulator delta(bench.topology.graph, bench.topology.wiring,
                                   kernel_for(SynapseOrder::Delta, 1), bench.config.lif);
    const ReservoirSimulator zeroth(bench.topology.graph, bench.topology.wiring,
                                    kernel_for(SynapseOrder::Zeroth, 1), bench.config.lif);
    const ScalingPoint p = bench.config.operating_point;
    const auto rd = simulate_dataset(delta, p, bench.data.samples, bench.threads);
    const auto rz = simulate_dataset(zeroth, p, bench.data.samples, bench.threads);
    bool same = rd == rz && record_summary(rd).dump() == record_summary(rz).dump();
    for (std::size_t i = 0; same && i < rd.size(); ++i) same = raster_csv(rd[i]) == raster_csv(rz[i]);
    const bool grids = grid_csv(grid_delta) == grid_csv(grid_zeroth1);
    return Outcome{same && grids, std::string("records ") + (same ? "identical" : "differ") + ", sweep grids " +
                                      (grids ? "byte-identical" : "differ")};
  });

  run_criterion(4, "refractory period over benchmark rasters", [&] {
    double min_isi = 1e300;
    std::size_t spikes = 0;
    for (auto [order, tau] : {std::pair{SynapseOrder::Delta, 1.0}, {SynapseOrder::Zeroth, 8.0},
                              {SynapseOrder::First, 8.0}, {SynapseOrder::Second, 8.0}}) {
      const ReservoirSimulator sim(bench.topology.graph, bench.topology.wiring, kernel_for(order, tau),
                                   bench.config.lif);
      for (double ain : bench.config.alpha_in_values) {
        for (double ares : bench.config.alpha_res_values) {
          const auto records = simulate_dataset(sim, ScalingPoint{ain, ares}, bench.data.samples, bench.threads);
          for (const auto& r : records) {
            spikes += r.total_spikes;
            for (const auto& times : r.raster) {
              for (std::size_t k = 1; k < times.size(); ++k) min_isi = std::min(min_isi, times[k] - times[k - 1]);
            }
          }
        }
      }
    }
    return Outcome{min_isi > 2.0, "min ISI " + fmt(min_isi) + " ms (> 2 ms) over " + std::to_string(spikes) +
                                      " spikes, 4 kernels x full grid"};
  });

  const auto opt2 = find_optimum(grid_second);
  const auto opt0 = find_optimum(grid_zeroth);
  const auto optd = find_optimum(grid_delta);

  run_criterion(7, "interior optimum (second order 8/4)", [&] {
    const auto curve = error_vs_activity(grid_second);
    const bool grid_interior = interior(grid_second.alpha_in_values, opt2.alpha_in) &&
                               interior(grid_second.alpha_res_values, opt2.alpha_res);
    bool non_monotone = false;
    bool rising = false;
    bool falling = false;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      if (curve.points[i].mean_error > curve.points[i - 1].mean_error) rising = true;
      if (curve.points[i].mean_error < curve.points[i - 1].mean_error) falling = true;
    }
    non_monotone = rising && falling;
    return Outcome{grid_interior && non_monotone && curve.optimum_interior(),
                   "optimum (" + fmt(opt2.alpha_in) + ", " + fmt(opt2.alpha_res) + ") error " + pct(opt2.min_error) +
                       (grid_interior ? " interior" : " on grid boundary") + "; activity " +
                       fmt(curve.min_error_activity) + " in [" + fmt(curve.min_activity) + ", " +
                       fmt(curve.max_activity) + "]" + (curve.optimum_interior() ? " interior" : " at edge") +
                       (non_monotone ? ", curve non-monotone" : ", curve monotone")};
  });

  run_criterion(8, "order comparison at optimum", [&] {
    const double e2 = opt2.min_error;
    const double e0 = opt0.min_error;
    const double ed = optd.min_error;
    const bool a = e2 <= e0;
    const bool b = e0 <= e2 + 0.03;
    const bool c = ed >= e0;
    const bool d = 1.0 - e2 >= 0.85;
    return Outcome{a && b && c && d,
                   "min error second " + pct(e2) + ", zeroth(8) " + pct(e0) + ", delta " + pct(ed) + "; second<=zeroth " +
                       (a ? "yes" : "no") + ", zeroth<=second+3pp " + (b ? "yes" : "no") + ", delta>=zeroth " +
                       (c ? "yes" : "no") + ", second accuracy " + pct(1.0 - e2) + (d ? " >= 85%" : " < 85%")};
  });

  run_criterion(9, "fixed-point degradation of delta", [&] {
    const std::vector<SynapseOrder> orders{SynapseOrder::Delta, SynapseOrder::Zeroth};
    const std::vector<double> taus{8};
    const auto rows = fixed_point_study(experiment, ScalingPoint{opt2.alpha_in, opt2.alpha_res}, orders, taus,
                                        bench.config.sweep_config());
    const auto& d = rows[0].result;
    const auto& z = rows[1].result;
    const bool ok = d.ok() && z.ok() && d.activity > z.activity && d.mean_error > z.mean_error;
    return Outcome{ok, "at (" + fmt(opt2.alpha_in) + ", " + fmt(opt2.alpha_res) + "): delta activity " +
                           fmt(d.activity) + " error " + pct(d.mean_error) + ", zeroth(8) activity " + fmt(z.activity) +
                           " error " + pct(z.mean_error)};
  });

  run_criterion(10, "activity band overlap at tau 8", [&] {
    const BandStats bands[] = {optimal_activity_band(grid_zeroth, 10), optimal_activity_band(grid_first, 10),
                               optimal_activity_band(grid_second, 10)};
    bool ok = true;
    for (const auto& p : bands) {
      for (const auto& q : bands) {
        ok = ok && std::max(p.mean - p.std, q.mean - q.std) <= std::min(p.mean + p.std, q.mean + q.std);
      }
    }
    const char* names[] = {"zeroth", "first", "second"};
    std::string detail;
    for (int i = 0; i < 3; ++i) {
      detail += std::string(i ? ", " : "") + names[i] + " " + fmt(bands[i].mean) + "+-" + fmt(bands[i].std);
    }
    return Outcome{ok, detail + (ok ? " pairwise intersect" : " do not all intersect")};
  });

  run_criterion(5, "benchmark weights within the clip", [&] {
    const auto detail = evaluate_point(experiment, bench.sweep(SynapseOrder::Second, 8),
                                       ScalingPoint{opt2.alpha_in, opt2.alpha_res}, true);
    const auto w = train_readout(assemble_responses(detail.records), bench.data.labels(), bench.config.readout);
    const double max_abs = w.w.cwiseAbs().maxCoeff();
    return Outcome{max_abs <= 8.0, "max |w| " + fmt(max_abs) + " (<= 8)"};
  });

  run_criterion(12, "determinism across reruns and thread counts", [&] {
    const fs::path cfg = work / "det_config.json";
    const nlohmann::json doc{{"sweep",
                              {{"alpha_in_values", {4, 8, 16}},
                               {"alpha_res_values", {0.5, 2}},
                               {"orders", {"delta", "zeroth", "second"}},
                               {"taus_ms", {4, 8}}}}};
    cli::write_file(cfg, doc.dump(2));
    const std::vector<std::string> commands{"gen-data", "gen-reservoir", "run --rasters", "sweep",
                                            "timescale-sweep", "fixed-point"};
    std::vector<std::vector<std::pair<std::string, std::string>>> snapshots;
    for (const char* threads : {"1", "3", "1"}) {
      const fs::path out = work / (std::string("det_threads") + threads + "_" + std::to_string(snapshots.size()));
      for (const auto& cmd : commands) {
        const std::string line = quote(lsm_binary) + " " + cmd + " -c " + quote(cfg) + " --threads " + threads +
                                 " -o " + quote(out) + " > /dev/null";
        if (const int status = shell(line); status != 0) {
          return Outcome{false, "'" + cmd + "' exited with status " + std::to_string(status)};
        }
      }
      const std::string analyze =
          quote(lsm_binary) + " analyze " + quote(out / "grid.csv") + " -o " + quote(out / "analysis") + " > /dev/null";
      if (shell(analyze) != 0) return Outcome{false, "analyze failed"};
      if (shell(quote(lsm_binary) + " cost --order second -o " + quote(out / "cost") + " > /dev/null") != 0) {
        return Outcome{false, "cost failed"};
      }
      snapshots.push_back(snapshot(out));
    }
    const bool same = snapshots[0] == snapshots[1] && snapshots[0] == snapshots[2];
    return Outcome{same, std::to_string(snapshots[0].size()) + " files compared across threads 1/3/1: " +
                             (same ? "byte-identical" : "differ")};
  });

  int failures = 0;
  for (const auto& [id, c] : results) {
    char timing[32];
    std::snprintf(timing, sizeof(timing), "%.1fs", c.seconds);
    std::cout << (c.pass ? "PASS" : "FAIL") << "  " << id << ". " << c.name << " [" << timing << "]: " << c.detail
              << std::endl;
    if (!c.pass) ++failures;
  }
  std::cout << (failures == 0 ? std::string("all criteria passed")
                              : std::to_string(failures) + " of " + std::to_string(results.size()) +
                                    " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
