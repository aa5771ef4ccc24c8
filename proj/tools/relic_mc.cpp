// relic-mc: command-line driver.
//
// Exit codes: 10 safe, 20 unsafe, 1 input error, 2 resource limit,
// 3 engine and oracle disagree (--oracle).

#include <sys/resource.h>

#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "relic/aiger.hpp"
#include "relic/certify.hpp"
#include "relic/engine.hpp"
#include "relic/oracle.hpp"
#include "relic/system_format.hpp"

namespace {

using namespace relic;

constexpr int kExitSafe = 10;
constexpr int kExitUnsafe = 20;
constexpr int kExitInput = 1;
constexpr int kExitLimit = 2;
constexpr int kExitDisagree = 3;

struct Options {
  std::vector<std::string> files;
  std::string proof_path;
  std::string trace_path;
  std::string witness_path;
  double timeout = 0;
  std::uint64_t mem_mb = 0;
  std::uint64_t seed = 0;
  std::string mic_threshold = "3";
  bool no_binary_search = false;
  bool no_ordering = false;
  bool oracle = false;
  std::string stats;
  bool dump_frames = false;
  bool check_invariants = false;
  bool no_coi = false;
  unsigned jobs = 1;
};

double rss_mb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return static_cast<double>(usage.ru_maxrss) / 1024.0;
}

const char* verdict_word(Outcome o) {
  switch (o) {
    case Outcome::Safe: return "SAFE";
    case Outcome::Unsafe: return "UNSAFE";
    default: return "UNKNOWN";
  }
}

bool write_file(const std::string& path, const std::string& content, std::ostream& err) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) {
    err << "relic-mc: cannot write " << path << '\n';
    return false;
  }
  return true;
}

struct Input {
  TransitionSystem system;
  std::optional<aiger::Prepared> aig;
};

Input load(const std::string& path, bool coi) {
  Input in;
  const std::filesystem::path p(path);
  if (!std::filesystem::exists(p)) throw std::runtime_error("cannot open " + path + ": no such file");
  if (p.extension() == ".sys") {
    in.system = read_system_file(p).system;
    return in;
  }
  aiger::PrepareOptions po;
  po.cone_of_influence = coi;
  in.aig = aiger::prepare(aiger::read_aiger_file(p), po);
  in.system = in.aig->system;
  return in;
}

// One proof attempt; all output goes to the given streams.
int run_one(const std::string& path, const Options& opt, bool multi, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Input input;
  try {
    input = load(path, !opt.no_coi);
  } catch (const std::exception& e) {
    err << "relic-mc: " << path << ": " << e.what() << '\n';
    return kExitInput;
  }

  EngineConfig cfg;
  cfg.solver_seed = opt.seed;
  cfg.use_binary_search = !opt.no_binary_search;
  cfg.use_literal_ordering = !opt.no_ordering;
  cfg.check_invariants = opt.check_invariants;
  if (opt.mic_threshold == "inf") {
    cfg.mic_threshold = EngineConfig::kUnbounded;
  } else {
    try {
      cfg.mic_threshold = std::stoi(opt.mic_threshold);
    } catch (const std::exception&) {
      cfg.mic_threshold = 0;
    }
    if (cfg.mic_threshold < 1) {
      err << "relic-mc: --mic-threshold must be a positive integer or 'inf'\n";
      return kExitInput;
    }
  }
  bool over_memory = false;
  cfg.interrupt = [&, deadline = start + std::chrono::duration<double>(opt.timeout)] {
    if (opt.timeout > 0 && std::chrono::steady_clock::now() >= deadline) return true;
    if (opt.mem_mb > 0 && rss_mb() > static_cast<double>(opt.mem_mb)) return over_memory = true;
    return false;
  };

  Engine engine(input.system, cfg);
  Verdict v;
  try {
    v = engine.prove();
  } catch (const std::bad_alloc&) {
    err << "relic-mc: " << path << ": out of memory\n";
    out << (multi ? "UNKNOWN " + path : std::string("UNKNOWN")) << '\n';
    return kExitLimit;
  } catch (const InvariantViolation& e) {
    err << "relic-mc: " << path << ": internal error: " << e.what() << '\n';
    return kExitInput;
  }
  const EngineStats& st = engine.stats();

  out << verdict_word(v.outcome);
  if (multi) out << ' ' << path;
  out << '\n';
  if (v.outcome == Outcome::Unknown)
    err << "relic-mc: " << path << ": " << (over_memory ? "memory" : "time") << " limit reached\n";

  if (opt.dump_frames && engine.k() > 0) engine.frames().dump(err, engine.k());

  if (v.outcome == Outcome::Safe && !opt.proof_path.empty()) {
    const auto proof = certify::make_proof(input.system, v, st.k);
    if (!write_file(opt.proof_path, certify::write_proof(proof), err)) return kExitInput;
  }
  if (v.outcome == Outcome::Unsafe && !opt.trace_path.empty()) {
    const auto trace = certify::make_trace(input.system, v.trace);
    if (!write_file(opt.trace_path, certify::write_trace(trace), err)) return kExitInput;
  }
  if (v.outcome == Outcome::Unsafe && !opt.witness_path.empty()) {
    if (!input.aig) {
      err << "relic-mc: --witness needs an AIGER input\n";
      return kExitInput;
    }
    if (!write_file(opt.witness_path, certify::aiger_witness(*input.aig, v.trace), err)) return kExitInput;
  }

  if (opt.stats == "json") {
    nlohmann::json j;
    j["file"] = path;
    j["verdict"] = verdict_word(v.outcome);
    j["seconds"] = st.seconds;
    j["memory_mb"] = st.peak_memory_mb;
    j["sat_calls"] = st.sat_calls;
    j["proof_size"] = st.proof_clauses;
    j["trace_length"] = st.trace_length;
    j["k"] = st.k;
    j["obligations"] = st.obligations;
    j["latches"] = input.system.num_latches();
    j["config"] = {{"seed", opt.seed},
                   {"mic_threshold", opt.mic_threshold},
                   {"binary_search", cfg.use_binary_search},
                   {"literal_ordering", cfg.use_literal_ordering}};
    out << j.dump() << '\n';
  } else if (opt.stats == "text") {
    out << "seconds " << st.seconds << '\n'
        << "memory_mb " << st.peak_memory_mb << '\n'
        << "sat_calls " << st.sat_calls << '\n'
        << "proof_size " << st.proof_clauses << '\n'
        << "trace_length " << st.trace_length << '\n'
        << "k " << st.k << '\n'
        << "obligations " << st.obligations << '\n';
  }

  int code = v.outcome == Outcome::Safe ? kExitSafe : v.outcome == Outcome::Unsafe ? kExitUnsafe : kExitLimit;

  if (opt.oracle) {
    try {
      const oracle::Result r = oracle::bfs_verdict(input.system);
      out << "oracle " << verdict_word(r.outcome) << '\n';
      if (v.outcome != Outcome::Unknown && r.outcome != v.outcome) {
        err << "relic-mc: " << path << ": engine and oracle disagree\n";
        code = kExitDisagree;
      }
    } catch (const oracle::BudgetExceeded& e) {
      err << "relic-mc: " << e.what() << '\n';
      return kExitLimit;
    }
  }
  return code;
}

int combine(const std::vector<int>& codes) {
  auto any = [&](int c) { return std::find(codes.begin(), codes.end(), c) != codes.end(); };
  if (any(kExitInput)) return kExitInput;
  if (any(kExitDisagree)) return kExitDisagree;
  if (any(kExitLimit)) return kExitLimit;
  if (any(kExitUnsafe)) return kExitUnsafe;
  return kExitSafe;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"SAFE/UNSAFE model checker for AIGER circuits and .sys systems"};
  app.add_option("files", opt.files, "AIGER (.aag/.aig) or .sys input files")->required();
  app.add_option("--proof", opt.proof_path, "write the inductive strengthening here when safe");
  app.add_option("--trace", opt.trace_path, "write the counterexample here when unsafe");
  app.add_option("--witness", opt.witness_path, "write an AIGER witness here when unsafe");
  app.add_option("--timeout", opt.timeout, "time limit in seconds (0: none)");
  app.add_option("--mem-mb", opt.mem_mb, "memory limit in MB (0: none)");
  app.add_option("--seed", opt.seed, "solver and MIC random seed");
  app.add_option("--mic-threshold", opt.mic_threshold, "consecutive necessary literals before MIC stops, or 'inf'");
  app.add_flag("--no-binary-search", opt.no_binary_search, "linear level search in inductive");
  app.add_flag("--no-ordering", opt.no_ordering, "random literal order in MIC");
  app.add_flag("--oracle", opt.oracle, "also run explicit-state reachability and compare");
  app.add_option("--stats", opt.stats, "print statistics")->check(CLI::IsMember({"json", "text"}));
  app.add_flag("--dump-frames", opt.dump_frames, "print the final frames to stderr");
  app.add_flag("--check-invariants", opt.check_invariants, "check the algorithm's assertions while running");
  app.add_flag("--no-coi", opt.no_coi, "skip cone-of-influence reduction");
  app.add_option("--jobs", opt.jobs, "proof attempts in parallel (over files)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  const bool multi = opt.files.size() > 1;
  if (multi && (!opt.proof_path.empty() || !opt.trace_path.empty() || !opt.witness_path.empty())) {
    std::cerr << "relic-mc: --proof, --trace and --witness need a single input file\n";
    return kExitInput;
  }
  if (!multi) return run_one(opt.files.front(), opt, false, std::cout, std::cerr);

  std::vector<int> codes(opt.files.size(), kExitInput);
  std::vector<std::string> outs(opt.files.size()), errs(opt.files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < opt.files.size();) {
      std::ostringstream o, e;
      codes[i] = run_one(opt.files[i], opt, true, o, e);
      outs[i] = o.str();
      errs[i] = e.str();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(opt.jobs, opt.files.size()); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < opt.files.size(); ++i) {
    std::cout << outs[i];
    std::cerr << errs[i];
  }
  return combine(codes);
}
