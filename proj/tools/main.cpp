// renyigan-lab: train toy adversarial models with the generalized losses,
// verify the analytic identities numerically, and evaluate divergences and
// Frechet distances from the command line.
//
// Exit codes: 0 ok, 1 config/parse error, 2 numerical divergence,
// 3 verification failure.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rlab/io.hpp"
#include "rlab/measures.hpp"
#include "rlab/trainer.hpp"
#include "rlab/verify_suite.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDivergence = 2;
constexpr int kExitVerifyFailed = 3;

// ---------------------------------------------------------------------------
// small CSV helpers
// ---------------------------------------------------------------------------

std::vector<std::vector<double>> read_numeric_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw rlab::SpecParseError("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) numeric = false;
      } catch (...) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;  // header row
        continue;
      }
      throw rlab::SpecParseError("non-numeric cell in " + path.string());
    }
    first = false;
    if (!rows.empty() && rows.back().size() != row.size())
      throw rlab::SpecParseError("ragged rows in " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw rlab::SpecParseError("no data in " + path.string());
  return rows;
}

rlab::Tensor<double> read_sample_csv(const fs::path& path) {
  const auto rows = read_numeric_csv(path);
  const int d = static_cast<int>(rows[0].size());
  rlab::Tensor<double> out(static_cast<int>(rows.size()), d);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int c = 0; c < d; ++c) out.at(static_cast<int>(r), c) = rows[r][c];
  return out;
}

void write_sample_csv(const fs::path& path, const rlab::Tensor<double>& t) {
  std::ofstream out(path, std::ios::binary);
  for (int c = 0; c < t.cols; ++c)
    out << (c ? "," : "") << "x" << c;
  out << "\r\n";
  for (int r = 0; r < t.rows; ++r) {
    for (int c = 0; c < t.cols; ++c)
      out << (c ? "," : "") << rlab::format_double(t.at(r, c));
    out << "\r\n";
  }
}

// ---------------------------------------------------------------------------
// distribution specs for `measure`: N(mean,variance), [w1,w2,...], or a
// histogram CSV path with lo,hi,mass columns
// ---------------------------------------------------------------------------

struct DistSpec {
  std::optional<rlab::DiscreteDist> discrete;
  std::optional<rlab::ContinuousDensity> continuous;
};

DistSpec parse_dist_spec(const std::string& text) {
  DistSpec out;
  if (text.size() > 2 && text.front() == '[' && text.back() == ']') {
    std::vector<double> w;
    std::stringstream ss(text.substr(1, text.size() - 2));
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        w.push_back(std::stod(cell));
      } catch (...) {
        throw rlab::SpecParseError("bad weight '" + cell + "' in " + text);
      }
    }
    try {
      out.discrete = rlab::DiscreteDist(w);
    } catch (const rlab::Error& e) {
      throw rlab::SpecParseError(std::string(e.what()) + " in " + text);
    }
    return out;
  }
  if (text.size() > 3 && (text.rfind("N(", 0) == 0) && text.back() == ')') {
    const std::string inner = text.substr(2, text.size() - 3);
    const auto comma = inner.find(',');
    if (comma == std::string::npos)
      throw rlab::SpecParseError("expected N(mean,variance), got " + text);
    try {
      const double mean = std::stod(inner.substr(0, comma));
      const double var = std::stod(inner.substr(comma + 1));
      out.continuous = rlab::ContinuousDensity::gaussian(mean, var);
    } catch (const rlab::SpecParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw rlab::SpecParseError(std::string("bad Gaussian spec: ") + e.what());
    }
    return out;
  }
  // otherwise: histogram CSV with rows lo,hi,mass
  const auto rows = read_numeric_csv(text);
  std::vector<double> edges, masses;
  for (const auto& row : rows) {
    if (row.size() != 3)
      throw rlab::SpecParseError("histogram rows must be lo,hi,mass");
    if (edges.empty()) {
      edges.push_back(row[0]);
    } else if (std::abs(edges.back() - row[0]) > 1e-12) {
      throw rlab::SpecParseError("histogram bins must be contiguous");
    }
    edges.push_back(row[1]);
    masses.push_back(row[2]);
  }
  try {
    out.continuous = rlab::ContinuousDensity::histogram(edges, masses);
  } catch (const rlab::Error& e) {
    throw rlab::SpecParseError(std::string(e.what()) + " in " + text);
  }
  return out;
}

// ---------------------------------------------------------------------------
// train / sweep plumbing
// ---------------------------------------------------------------------------

struct RunSummary {
  bool diverged = false;
  double final_fid = 0.0;
  double best_fid = 0.0;
  int best_epoch = -1;
  std::optional<rlab::ModeCoverage> coverage;
};

RunSummary write_run_artifacts(const rlab::TrainConfig& cfg,
                               const rlab::TrainResult& result,
                               const fs::path& out_dir) {
  fs::create_directories(out_dir);
  {
    std::ofstream csv(out_dir / "runrecord.csv", std::ios::binary);
    csv << result.record.to_csv();
  }
  {
    std::ofstream json(out_dir / "runrecord.json", std::ios::binary);
    json << result.record.to_json().dump(2) << '\n';
  }
  result.generator.save(out_dir / "generator.json");
  result.discriminator.save(out_dir / "discriminator.json");

  // final sample set, reproducible from the seed
  rlab::Rng sample_rng(cfg.seed ^ 0x5a17ce5ull);
  rlab::Tensor<double> z(cfg.fid_samples, cfg.latent_dim);
  for (auto& v : z.data) v = sample_rng.normal();
  const auto samples = result.generator.eval(z);
  write_sample_csv(out_dir / "samples.csv", samples);

  RunSummary summary;
  summary.diverged = result.diverged;
  for (const auto& row : result.record.rows) {
    if (summary.best_epoch < 0 || row.fid < summary.best_fid) {
      summary.best_fid = row.fid;
      summary.best_epoch = row.epoch;
    }
    summary.final_fid = row.fid;
  }
  const rlab::SyntheticDataset dataset(cfg.dataset);
  if (dataset.is_mixture())
    summary.coverage = rlab::mode_coverage(samples, dataset);
  return summary;
}

int cmd_train(const std::string& config_path,
              const std::optional<std::uint64_t>& seed,
              const std::string& out_dir) {
  rlab::TrainConfig cfg = rlab::load_experiment_file(config_path);
  if (seed) cfg.seed = *seed;
  const auto result = rlab::train(cfg);
  const auto summary = write_run_artifacts(cfg, result, out_dir);

  std::cout << "family " << rlab::family_name(cfg.family) << ", seed "
            << cfg.seed << ", " << result.record.rows.size() << " epochs\n";
  if (summary.best_epoch >= 0) {
    std::cout << "best fid " << rlab::format_significant(summary.best_fid, 6)
              << " at epoch " << summary.best_epoch << "; final fid "
              << rlab::format_significant(summary.final_fid, 6) << '\n';
  }
  if (summary.coverage) {
    std::cout << "modes hit " << summary.coverage->modes_hit << ", high-quality "
              << rlab::format_significant(
                     summary.coverage->high_quality_fraction, 4)
              << '\n';
  }
  std::cout << "artifacts in " << out_dir << '\n';
  if (result.diverged) {
    std::cerr << "numerical divergence: " << result.divergence_message << '\n';
    return kExitDivergence;
  }
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& seeds_arg,
              int jobs, const std::string& out_dir) {
  const rlab::TrainConfig base = rlab::load_experiment_file(config_path);
  std::vector<std::uint64_t> seeds;
  {
    std::stringstream ss(seeds_arg);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        seeds.push_back(std::stoull(cell));
      } catch (...) {
        throw rlab::ConfigInvalid("bad seed '" + cell + "'");
      }
    }
  }
  if (seeds.empty()) throw rlab::ConfigInvalid("sweep needs at least one seed");

  if (const char* cap = std::getenv("RENYIGAN_LAB_THREADS")) {
    try {
      jobs = std::min(jobs, std::max(1, std::stoi(cap)));
    } catch (...) {
      throw rlab::ConfigInvalid("RENYIGAN_LAB_THREADS is not an integer");
    }
  }
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(seeds.size())));

  std::vector<RunSummary> summaries(seeds.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < seeds.size();
         i = next.fetch_add(1)) {
      try {
        rlab::TrainConfig cfg = base;
        cfg.seed = seeds[i];
        const auto result = rlab::train(cfg);
        summaries[i] = write_run_artifacts(
            cfg, result, fs::path(out_dir) / ("seed-" + std::to_string(seeds[i])));
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) first_error = e.what();
      }
    }
  };
  std::vector<std::thread> threads;
  for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (failed) throw rlab::Error(first_error);

  fs::create_directories(out_dir);
  std::ofstream csv(fs::path(out_dir) / "summary.csv", std::ios::binary);
  csv << "seed,diverged,final_fid,best_fid,best_epoch,modes_hit,"
         "high_quality_fraction\r\n";
  bool any_diverged = false;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& s = summaries[i];
    any_diverged = any_diverged || s.diverged;
    csv << seeds[i] << ',' << (s.diverged ? 1 : 0) << ','
        << rlab::format_double(s.final_fid) << ','
        << rlab::format_double(s.best_fid) << ',' << s.best_epoch << ',';
    if (s.coverage) {
      csv << s.coverage->modes_hit << ','
          << rlab::format_double(s.coverage->high_quality_fraction);
    } else {
      csv << ',';
    }
    csv << "\r\n";
    std::cout << "seed " << seeds[i] << ": best fid "
              << rlab::format_significant(s.best_fid, 6) << " at epoch "
              << s.best_epoch
              << (s.diverged ? " (diverged)" : "") << '\n';
  }
  std::cout << "summary in " << out_dir << "/summary.csv\n";
  return any_diverged ? kExitDivergence : kExitOk;
}

int cmd_verify(double tolerance, const std::string& only) {
  const auto rows = rlab::run_verify_suite(only);
  if (rows.empty()) {
    std::cerr << "no checks match '" << only << "'\n";
    return kExitConfig;
  }
  std::size_t width = 0;
  for (const auto& row : rows) width = std::max(width, row.name.size());
  bool all_ok = true;
  std::printf("%-*s  %14s  %14s  %12s  %s\n", static_cast<int>(width),
              "check", "lhs", "rhs", "gap", "status");
  for (const auto& row : rows) {
    const bool ok = row.gap <= tolerance;
    all_ok = all_ok && ok;
    std::printf("%-*s  %14.6e  %14.6e  %12.3e  %s\n", static_cast<int>(width),
                row.name.c_str(), row.lhs, row.rhs, row.gap,
                ok ? "pass" : "FAIL");
  }
  std::printf("%zu checks, tolerance %g: %s\n", rows.size(), tolerance,
              all_ok ? "all passed" : "FAILURES");
  return all_ok ? kExitOk : kExitVerifyFailed;
}

int cmd_measure(const std::string& name, const std::string& p_spec,
                const std::string& q_spec, std::optional<double> order) {
  const DistSpec p = parse_dist_spec(p_spec);
  const DistSpec q = parse_dist_spec(q_spec);
  const bool discrete = p.discrete.has_value();
  if (discrete != q.discrete.has_value())
    throw rlab::SpecParseError("both distributions must be the same kind");

  auto need_order = [&]() -> rlab::Order {
    if (!order)
      throw rlab::SpecParseError("measure '" + name + "' needs --order");
    return rlab::Order(*order);
  };

  double value = 0.0;
  if (name == "kl-divergence" || name == "kl") {
    value = discrete ? rlab::kl_divergence(*p.discrete, *q.discrete)
                     : rlab::kl_divergence(*p.continuous, *q.continuous);
  } else if (name == "shannon-cross-entropy") {
    value = discrete
                ? rlab::shannon_cross_entropy(*p.discrete, *q.discrete)
                : rlab::shannon_cross_entropy(*p.continuous, *q.continuous);
  } else if (name == "pearson-vajda") {
    const auto k = need_order();
    value = discrete ? rlab::pearson_vajda(*p.discrete, *q.discrete, k)
                     : rlab::pearson_vajda(*p.continuous, *q.continuous, k);
  } else if (name == "renyi-divergence") {
    const auto a = need_order();
    value = discrete ? rlab::renyi_divergence(*p.discrete, *q.discrete, a)
                     : rlab::renyi_divergence(*p.continuous, *q.continuous, a);
  } else if (name == "renyi-cross-entropy") {
    const auto a = need_order();
    value = discrete
                ? rlab::renyi_cross_entropy(*p.discrete, *q.discrete, a)
                : rlab::renyi_cross_entropy(*p.continuous, *q.continuous, a);
  } else if (name == "jensen-shannon") {
    value = discrete ? rlab::jensen_shannon(*p.discrete, *q.discrete)
                     : rlab::jensen_shannon(*p.continuous, *q.continuous);
  } else if (name == "jensen-renyi") {
    const auto a = need_order();
    value = discrete ? rlab::jensen_renyi(*p.discrete, *q.discrete, a)
                     : rlab::jensen_renyi(*p.continuous, *q.continuous, a);
  } else {
    throw rlab::SpecParseError(
        "unknown measure '" + name +
        "' (kl-divergence, shannon-cross-entropy, pearson-vajda, "
        "renyi-divergence, renyi-cross-entropy, jensen-shannon, jensen-renyi)");
  }
  std::cout << rlab::format_significant(value, 12) << '\n';
  return kExitOk;
}

int cmd_fid(const std::string& a_path, const std::string& b_path) {
  const auto a = read_sample_csv(a_path);
  const auto b = read_sample_csv(b_path);
  std::cout << rlab::format_significant(rlab::frechet_distance(a, b), 12)
            << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for generalized adversarial losses"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::optional<std::uint64_t> seed;
  auto* train = app.add_subcommand("train", "run one training experiment");
  train->add_option("config", config_path, "experiment JSON file")->required();
  train->add_option("--seed", seed, "override the config seed");
  train->add_option("--out-dir", out_dir, "artifact directory");

  std::string seeds_arg = "1,2,3,4,5";
  int jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "run the experiment across seeds");
  sweep->add_option("config", config_path, "experiment JSON file")->required();
  sweep->add_option("--seeds", seeds_arg, "comma-separated seed list");
  sweep->add_option("--jobs", jobs, "worker threads (capped by RENYIGAN_LAB_THREADS)");
  sweep->add_option("--out-dir", out_dir, "artifact directory");

  double tolerance = 1e-5;
  std::string only;
  auto* verify = app.add_subcommand("verify", "check the analytic identities");
  verify->add_option("--tolerance", tolerance, "maximum allowed gap");
  verify->add_option("--only", only, "run only checks whose name contains this");

  std::string measure_name, p_spec, q_spec;
  std::optional<double> order;
  auto* measure = app.add_subcommand("measure", "evaluate a divergence");
  measure->add_option("name", measure_name, "measure name")->required();
  measure->add_option("p", p_spec, "first distribution spec")->required();
  measure->add_option("q", q_spec, "second distribution spec")->required();
  measure->add_option("--order", order, "order (alpha or k) where needed");

  std::string fid_a, fid_b;
  auto* fid = app.add_subcommand("fid", "Frechet distance between sample CSVs");
  fid->add_option("a", fid_a, "first sample CSV")->required();
  fid->add_option("b", fid_b, "second sample CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (train->parsed()) return cmd_train(config_path, seed, out_dir);
    if (sweep->parsed()) return cmd_sweep(config_path, seeds_arg, jobs, out_dir);
    if (verify->parsed()) return cmd_verify(tolerance, only);
    if (measure->parsed())
      return cmd_measure(measure_name, p_spec, q_spec, order);
    if (fid->parsed()) return cmd_fid(fid_a, fid_b);
  } catch (const rlab::ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rlab::SpecParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rlab::OrderOutOfRange& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rlab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDivergence;
  }
  return kExitConfig;
}
