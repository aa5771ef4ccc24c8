#include "relic/certify.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "relic/sat.hpp"

namespace relic::certify {

namespace {

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::string_view next(const char* what) {
    if (pos_ >= text_.size()) throw CertificateError(std::string("unexpected end of file, expected ") + what);
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    std::string_view line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++line_;
    return line;
  }

  /// "key value" with an unsigned value.
  std::uint64_t keyed(std::string_view key, int base = 10) {
    std::string_view line = next(std::string(key).c_str());
    if (line.substr(0, key.size()) != key || line.size() <= key.size() + 1 || line[key.size()] != ' ')
      fail("expected '" + std::string(key) + " <value>'");
    return number(line.substr(key.size() + 1), base);
  }

  std::uint64_t number(std::string_view s, int base = 10) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (ec != std::errc() || p != s.data() + s.size()) fail("bad number '" + std::string(s) + "'");
    return v;
  }

  Cnf clauses(std::uint64_t n) {
    Cnf out;
    for (std::uint64_t i = 0; i < n; ++i) {
      std::string_view line = next("clause");
      try {
        auto c = Clause::try_make(parse_lits(line));
        if (!c) fail("tautological clause");
        out.push_back(std::move(*c));
      } catch (const StructuralError& e) {
        fail(e.what());
      }
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw CertificateError("line " + std::to_string(line_) + ": " + what);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

// Minimal CNF query helper on a private solver.
class Query {
 public:
  explicit Query(const TransitionSystem& sys) : sys_(sys) { s_.ensure_vars(sys.num_vars()); }
  void add(const Cnf& f, bool primed = false) {
    for (const Clause& c : f) s_.add_clause(primed ? sys_.prime(c) : c);
  }
  void add_negation(const Cnf& f, bool primed = false) {
    std::vector<Lit> any;
    for (const Clause& c : f) {
      const Lit b(s_.new_var());
      any.push_back(b);
      for (Lit l : c) s_.add_clause({~b, primed ? ~sys_.prime(l) : ~l});
    }
    s_.add_clause(any);
  }
  bool sat(std::span<const Lit> assumptions = {}) { return s_.solve(assumptions) == sat::Status::Sat; }

 private:
  const TransitionSystem& sys_;
  sat::Solver s_;
};

bool latch_only(const TransitionSystem& sys, const Cnf& f) {
  for (const Clause& c : f)
    for (Lit l : c)
      if (!sys.is_latch(l.var())) return false;
  return true;
}

}  // namespace

ProofFile make_proof(const TransitionSystem& sys, const Verdict& v, int k) {
  return ProofFile{sys.hash(), sys.num_latches(), k, sys.property(), v.strengthening};
}

std::string write_proof(const ProofFile& p) {
  std::ostringstream out;
  out << "relic-proof 1\n"
      << "hash " << hex(p.system_hash) << '\n'
      << "latches " << p.latches << '\n'
      << "k " << p.k << '\n'
      << "property " << p.property.size() << '\n';
  for (const Clause& c : p.property) out << to_text(c) << '\n';
  out << "clauses " << p.clauses.size() << '\n';
  for (const Clause& c : p.clauses) out << to_text(c) << '\n';
  return out.str();
}

ProofFile parse_proof(std::string_view text) {
  LineReader r(text);
  if (r.next("header") != "relic-proof 1") r.fail("expected 'relic-proof 1'");
  ProofFile p;
  p.system_hash = r.keyed("hash", 16);
  p.latches = static_cast<std::uint32_t>(r.keyed("latches"));
  p.k = static_cast<int>(r.keyed("k"));
  p.property = r.clauses(r.keyed("property"));
  p.clauses = r.clauses(r.keyed("clauses"));
  return p;
}

TraceFile make_trace(const TransitionSystem& sys, const Trace& t) {
  return TraceFile{sys.hash(), sys.num_latches(), sys.num_inputs(), t};
}

std::string write_trace(const TraceFile& t) {
  auto bits = [](const std::vector<bool>& v) {
    if (v.empty()) return std::string("-");
    std::string s;
    for (bool b : v) s += b ? '1' : '0';
    return s;
  };
  std::ostringstream out;
  out << "relic-trace 1\n"
      << "hash " << hex(t.system_hash) << '\n'
      << "latches " << t.latches << " inputs " << t.inputs << '\n'
      << "steps " << t.trace.states.size() << '\n';
  for (std::size_t i = 0; i < t.trace.states.size(); ++i) {
    const InputVector none(t.inputs, false);
    out << bits(t.trace.states[i]) << ' ' << bits(i < t.trace.inputs.size() ? t.trace.inputs[i] : none) << '\n';
  }
  return out.str();
}

TraceFile parse_trace(std::string_view text) {
  LineReader r(text);
  if (r.next("header") != "relic-trace 1") r.fail("expected 'relic-trace 1'");
  TraceFile t;
  t.system_hash = r.keyed("hash", 16);
  {
    std::string_view line = r.next("sizes");
    std::istringstream in{std::string(line)};
    std::string a, b;
    if (!(in >> a >> t.latches >> b >> t.inputs) || a != "latches" || b != "inputs")
      r.fail("expected 'latches L inputs N'");
  }
  const std::uint64_t steps = r.keyed("steps");
  if (steps == 0) r.fail("a trace has at least one step");
  auto parse_bits = [&](std::string_view s, std::uint32_t n) {
    std::vector<bool> v;
    if (s == "-") s = {};
    if (s.size() != n) r.fail("expected " + std::to_string(n) + " bits");
    for (char c : s) {
      if (c != '0' && c != '1') r.fail("bits must be 0 or 1");
      v.push_back(c == '1');
    }
    return v;
  };
  for (std::uint64_t i = 0; i < steps; ++i) {
    std::string_view line = r.next("step");
    const std::size_t sp = line.find(' ');
    if (sp == std::string_view::npos) r.fail("expected '<latch bits> <input bits>'");
    t.trace.states.push_back(parse_bits(line.substr(0, sp), t.latches));
    t.trace.inputs.push_back(parse_bits(line.substr(sp + 1), t.inputs));
  }
  return t;
}

bool check_strengthening(const TransitionSystem& sys, const Cnf& f) {
  if (!latch_only(sys, f)) return false;
  Cnf fp = f;
  fp.insert(fp.end(), sys.property().begin(), sys.property().end());
  {
    Query q(sys);
    q.add(sys.init());
    q.add_negation(fp);
    if (q.sat()) return false;
  }
  {
    Query q(sys);
    q.add(fp);
    q.add(sys.trans());
    q.add_negation(fp, true);
    if (q.sat()) return false;
  }
  {
    Query q(sys);
    q.add(fp);
    q.add_negation(sys.property());
    if (q.sat()) return false;
  }
  return true;
}

bool check_proof(const TransitionSystem& sys, const ProofFile& proof) {
  if (proof.system_hash != sys.hash()) throw CertificateError("proof belongs to a different system");
  if (proof.latches != sys.num_latches()) throw CertificateError("latch count mismatch");
  if (proof.property != sys.property()) return false;
  return check_strengthening(sys, proof.clauses);
}

bool check_trace(const TransitionSystem& sys, const Trace& t) {
  const std::uint32_t nl = sys.num_latches();
  const std::uint32_t ni = sys.num_inputs();
  if (t.states.empty() || t.inputs.size() != t.states.size()) return false;
  for (std::size_t i = 0; i < t.states.size(); ++i)
    if (t.states[i].size() != nl || t.inputs[i].size() != ni) return false;
  if (!sys.holds(sys.init(), t.states.front())) return false;
  if (sys.holds(sys.property(), t.states.back())) return false;

  for (std::size_t i = 0; i + 1 < t.states.size(); ++i) {
    const State& s = t.states[i];
    const State& next = t.states[i + 1];
    if (sys.netlist()) {
      if (sys.netlist()->step(s, t.inputs[i]) != next) return false;
      continue;
    }
    Assignment a(sys.num_vars());
    std::vector<Lit> fixed;
    for (std::uint32_t l = 0; l < nl; ++l) {
      a.set(sys.latch(l), s[l]);
      a.set(sys.primed(l), next[l]);
      fixed.push_back(Lit(sys.latch(l), !s[l]));
      fixed.push_back(Lit(sys.primed(l), !next[l]));
    }
    for (std::uint32_t j = 0; j < ni; ++j) {
      a.set(sys.input(j), t.inputs[i][j]);
      fixed.push_back(Lit(sys.input(j), !t.inputs[i][j]));
    }
    if (sys.num_aux() == 0) {
      if (!a.satisfies(sys.trans())) return false;
    } else {
      Query q(sys);
      q.add(sys.trans());
      if (!q.sat(fixed)) return false;
    }
  }
  return true;
}

bool check_trace(const TransitionSystem& sys, const TraceFile& t) {
  if (t.system_hash != sys.hash()) throw CertificateError("trace belongs to a different system");
  if (t.latches != sys.num_latches() || t.inputs != sys.num_inputs())
    throw CertificateError("latch or input count mismatch");
  return check_trace(sys, t.trace);
}

std::string aiger_witness(const aiger::Prepared& prepared, const Trace& t) {
  const aiger::AigModel& orig = prepared.original;
  const aiger::AigModel& red = prepared.reduced;
  std::size_t frames = t.states.size();
  if (prepared.monitored && frames > 1) --frames;

  std::string init(orig.latches.size(), '0');
  for (std::size_t i = 0; i < orig.latches.size(); ++i)
    if (orig.latches[i].reset == aiger::Reset::One) init[i] = '1';
  for (std::size_t i = 0; i < red.latches.size(); ++i) {
    const int o = i < red.latch_origin.size() ? red.latch_origin[i] : -1;
    if (o >= 0 && !t.states.empty()) init[static_cast<std::size_t>(o)] = t.states.front()[i] ? '1' : '0';
  }

  std::ostringstream out;
  out << "1\nb0\n" << init << '\n';
  for (std::size_t f = 0; f < frames; ++f) {
    std::string in(orig.inputs.size(), '0');
    for (std::size_t j = 0; j < red.inputs.size(); ++j) {
      const int o = j < red.input_origin.size() ? red.input_origin[j] : -1;
      if (o >= 0 && f < t.inputs.size()) in[static_cast<std::size_t>(o)] = t.inputs[f][j] ? '1' : '0';
    }
    out << in << '\n';
  }
  out << ".\n";
  return out.str();
}

}  // namespace relic::certify
