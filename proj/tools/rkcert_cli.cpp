// rkcert: run, seal and check certificates for exact linear algebra over
// prime fields; measure soundness of cheating provers; benchmark verifier
// cost against recomputation.
//
// Exit codes: 0 accept (or pass), 1 reject (or fail), 2 abort or usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rkcert/rkcert.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace rkcert;

constexpr int kAccept = 0;
constexpr int kReject = 1;
constexpr int kAbort = 2;

struct Usage : Error {
  using Error::Error;
};

la::DenseMatrix load_matrix(const std::string& path, std::optional<std::uint64_t> modulus) {
  std::ifstream in(path);
  if (!in) throw Usage("cannot open " + path);
  la::DenseMatrix a = la::read_matrix(in);
  if (!modulus || *modulus == a.field().modulus()) return a;
  const PrimeField f(*modulus);
  la::DenseMatrix b(f, a.rows(), a.cols());
  for (std::size_t k = 0; k < a.data().size(); ++k) b.data()[k] = f.reduce(a.data()[k]);
  return b;
}

int exit_code(const proto::Verdict& v) {
  switch (v.status) {
    case proto::Status::Accept: return kAccept;
    case proto::Status::Reject: return kReject;
    case proto::Status::Abort: return kAbort;
  }
  return kAbort;
}

std::vector<std::size_t> one_based(const std::vector<std::size_t>& v) {
  std::vector<std::size_t> out(v);
  for (auto& x : out) ++x;
  return out;
}

json result_json(const proto::Certified& c) {
  json r = json::object();
  if (c.rank) r["rank"] = *c.rank;
  if (c.determinant) r["determinant"] = *c.determinant;
  if (c.profile) r["profile"] = one_based(c.profile->indices);
  if (c.rpm) {
    json ones = json::array();
    for (auto [i, j] : c.rpm->ones) ones.push_back({i + 1, j + 1});
    r["rpm"] = ones;
  }
  return r;
}

json meter_json(const CostMeter& m) {
  return {{"elements_prover_to_verifier", m.elements_prover_to_verifier},
          {"elements_verifier_to_prover", m.elements_verifier_to_prover},
          {"integers_sent", m.integers_sent},
          {"verifier_matvecs", m.verifier_matvecs},
          {"verifier_submatrix_matvecs", m.verifier_submatrix_matvecs},
          {"verifier_field_ops", m.verifier_field_ops}};
}

json report(proto::ProtocolId id, const proto::Inputs& in, std::uint64_t seed, const proto::Execution& e) {
  return {{"protocol", proto::name(id)},
          {"m", in.a.rows()},
          {"n", in.a.cols()},
          {"p", in.a.field().modulus()},
          {"seed", seed},
          {"verdict", proto::to_string(e.run.verdict.status)},
          {"cause", proto::to_string(e.run.verdict.cause)},
          {"detail", e.run.verdict.detail},
          {"result", result_json(e.run.result)},
          {"meter", meter_json(e.meter)}};
}

void print_text(const json& r) {
  std::cout << "protocol: " << r["protocol"].get<std::string>() << '\n';
  std::cout << "verdict: " << r["verdict"].get<std::string>();
  if (r["cause"] != "None") std::cout << " (" << r["cause"].get<std::string>() << ")";
  std::cout << '\n';
  if (!r["detail"].get<std::string>().empty()) std::cout << "detail: " << r["detail"].get<std::string>() << '\n';
  const auto& res = r["result"];
  if (res.contains("rank")) std::cout << "rank: " << res["rank"] << '\n';
  if (res.contains("determinant")) std::cout << "det: " << res["determinant"] << '\n';
  if (res.contains("profile")) std::cout << "profile: " << res["profile"].dump() << '\n';
  if (res.contains("rpm")) std::cout << "rpm: " << res["rpm"].dump() << '\n';
  const auto& m = r["meter"];
  std::cout << "communication: " << m["elements_prover_to_verifier"] << " elements P->V, "
            << m["elements_verifier_to_prover"] << " elements V->P, " << m["integers_sent"] << " integers\n";
  std::cout << "verifier: " << m["verifier_matvecs"] << " matvecs, " << m["verifier_submatrix_matvecs"]
            << " submatrix matvecs, " << m["verifier_field_ops"] << " field ops\n";
}

struct StatementArgs {
  std::string protocol;
  std::string matrix;
  std::string rhs;
  std::string side = "lower";
  std::optional<std::size_t> claim;
  std::size_t repetitions = 1;
  std::optional<std::uint64_t> modulus;

  void add(CLI::App* cmd) {
    cmd->add_option("protocol", protocol, "Protocol name")->required();
    cmd->add_option("matrix", matrix, "Matrix file")->required();
    cmd->add_option("--rhs", rhs, "Second matrix B (freivalds, tri-equiv)");
    cmd->add_option("--side", side, "Triangle of T for tri-equiv")->check(CLI::IsMember({"lower", "upper"}));
    cmd->add_option("--claim", claim, "Rank bound claimed by rank-upper");
    cmd->add_option("--repetitions", repetitions, "Freivalds repetitions")->check(CLI::PositiveNumber);
    cmd->add_option("--modulus", modulus, "Reduce the entries modulo this prime");
  }

  proto::ProtocolId id() const {
    auto id = proto::protocol_from_name(protocol);
    if (!id) throw Usage("unknown protocol: " + protocol);
    return *id;
  }

  proto::Inputs inputs() const {
    proto::Inputs in(load_matrix(matrix, modulus));
    if (!rhs.empty()) in.b = load_matrix(rhs, in.a.field().modulus());
    in.side = side == "upper" ? proto::Side::Upper : proto::Side::Lower;
    in.rank_claim = claim;
    in.repetitions = repetitions;
    proto::validate(id(), in);
    return in;
  }
};

proto::Bytes read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Usage("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------
// bench

template <class F>
double median_seconds(std::size_t repeat, F&& fn) {
  std::vector<double> t;
  for (std::size_t k = 0; k < repeat; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

json bench(std::size_t n, std::uint64_t p, std::size_t repeat, std::uint64_t seed) {
  const PrimeField f(p);
  SeededRandom rng(seed);
  const proto::Inputs in(la::random_nonsingular(f, n, rng));
  const auto v = la::random_matrix(f, n, 1, rng).data();
  std::size_t rank = 0;
  la::Vector image;
  const double pluq = median_seconds(repeat, [&] { rank = la::pluq_crp(in.a).rank; });
  const double matvec = median_seconds(repeat, [&] { image = la::matvec(in.a, v); });
  if (rank != n || image.size() != n) throw Error("bench: unexpected factorization");
  json protocols = json::array();
  for (auto id : {proto::ProtocolId::Det, proto::ProtocolId::Grp, proto::ProtocolId::Crp}) {
    std::vector<double> vt, pt;
    proto::Execution last;
    for (std::size_t k = 0; k < repeat; ++k) {
      proto::RunOptions opt;
      opt.timing = true;
      last = proto::execute_honest(id, in, seed + k, opt);
      vt.push_back(last.run.verifier_seconds);
      pt.push_back(last.run.prover_seconds);
    }
    std::sort(vt.begin(), vt.end());
    std::sort(pt.begin(), pt.end());
    const double verifier = vt[vt.size() / 2];
    protocols.push_back({{"protocol", proto::name(id)},
                         {"verdict", proto::to_string(last.run.verdict.status)},
                         {"cause", proto::to_string(last.run.verdict.cause)},
                         {"verifier_seconds", verifier},
                         {"prover_seconds", pt[pt.size() / 2]},
                         {"verifier_over_pluq", verifier / pluq},
                         {"communication", last.meter.communication()},
                         {"meter", meter_json(last.meter)}});
  }
  const auto cert = proto::encode_pluq(la::pluq_crp(in.a));
  return {{"n", n},
          {"p", p},
          {"repeat", repeat},
          {"seed", seed},
          {"pluq_seconds", pluq},
          {"matvec_seconds", matvec},
          {"pluq_over_matvec", pluq / matvec},
          {"pluq_certificate_communication", cert.elements.size() + cert.integers.size()},
          {"protocols", protocols}};
}

void print_bench(const json& b) {
  std::cout << "n = " << b["n"] << ", p = " << b["p"] << ", median of " << b["repeat"] << "\n";
  std::cout << std::left << std::setw(22) << "PLUQ (prover)" << b["pluq_seconds"].get<double>() << " s\n";
  std::cout << std::setw(22) << "matvec" << b["matvec_seconds"].get<double>() << " s\n";
  std::cout << std::setw(22) << "PLUQ certificate" << b["pluq_certificate_communication"] << " words\n";
  for (const auto& p : b["protocols"]) {
    std::cout << std::setw(22) << ("verifier " + p["protocol"].get<std::string>()) << p["verifier_seconds"].get<double>()
              << " s  ratio " << p["verifier_over_pluq"].get<double>() << "  communication " << p["communication"]
              << " words  " << p["verdict"].get<std::string>() << '\n';
  }
}

// ---------------------------------------------------------------------------
// gen

la::DenseMatrix generate(const std::string& kind, std::size_t m, std::size_t n, std::optional<std::size_t> rank,
                         const PrimeField& f, std::uint64_t seed) {
  SeededRandom rng(seed);
  if (kind == "identity") {
    la::DenseMatrix a(f, m, n);
    for (std::size_t i = 0; i < std::min(m, n); ++i) a(i, i) = 1;
    return a;
  }
  if (kind == "swap" || kind == "antidiag") {
    la::DenseMatrix a(f, m, n);
    for (std::size_t i = 0; i < std::min(m, n); ++i) a(i, n - 1 - i) = 1;
    return a;
  }
  if (kind == "random") return la::random_matrix(f, m, n, rng);
  if (kind == "nonsingular") {
    if (m != n) throw Usage("nonsingular needs a square shape");
    return la::random_nonsingular(f, n, rng);
  }
  if (kind == "rankdef") {
    const std::size_t r = rank.value_or(std::min(m, n) == 0 ? 0 : std::min(m, n) - 1);
    return la::random_rank_matrix(f, m, n, r, rng);
  }
  throw Usage("unknown generator: " + kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certificates for exact linear algebra over prime fields"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // run
  StatementArgs run_args;
  std::uint64_t run_seed = 1;
  bool run_json = false;
  auto* run_cmd = app.add_subcommand("run", "Run an interactive protocol with the honest prover");
  run_args.add(run_cmd);
  run_cmd->add_option("--seed", run_seed, "Verifier randomness seed");
  run_cmd->add_flag("--json", run_json, "JSON report");

  // seal
  StatementArgs seal_args;
  std::string seal_out;
  auto* seal_cmd = app.add_subcommand("seal", "Write a non-interactive certificate");
  seal_args.add(seal_cmd);
  seal_cmd->add_option("-o,--output", seal_out, "Certificate file")->required();

  // check
  StatementArgs check_args;
  std::string check_blob;
  bool check_json = false;
  auto* check_cmd = app.add_subcommand("check", "Verify a non-interactive certificate");
  check_args.add(check_cmd);
  check_cmd->add_option("certificate", check_blob, "Certificate file")->required();
  check_cmd->add_flag("--json", check_json, "JSON report");

  // attack
  std::string attack_name;
  std::size_t attack_trials = 10000;
  std::uint64_t attack_p = 101, attack_seed = 1;
  bool attack_json = false;
  auto* attack_cmd = app.add_subcommand("attack", "Measure the acceptance rate of a cheating prover");
  attack_cmd->add_option("adversary", attack_name, "grp-forge, crp-shift, tri-ghost, freivalds, scale-d, rpm-perm")
      ->required();
  attack_cmd->add_option("--trials", attack_trials, "Number of seeded trials");
  attack_cmd->add_option("--modulus", attack_p, "Field characteristic");
  attack_cmd->add_option("--seed", attack_seed, "Base seed");
  attack_cmd->add_flag("--json", attack_json, "JSON report");

  // bench
  std::size_t bench_n = 256, bench_repeat = 3, bench_cap = 4096;
  std::uint64_t bench_p = kDefaultModulus, bench_seed = 1;
  bool bench_json = false;
  auto* bench_cmd = app.add_subcommand("bench", "Time verification against recomputation");
  bench_cmd->add_option("n", bench_n, "Dimension")->required();
  bench_cmd->add_option("--modulus", bench_p, "Field characteristic");
  bench_cmd->add_option("--repeat", bench_repeat, "Repetitions (median is reported)")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--cap", bench_cap, "Largest accepted dimension");
  bench_cmd->add_option("--seed", bench_seed, "Seed of the random matrix");
  bench_cmd->add_flag("--json", bench_json, "JSON report");

  // gen
  std::string gen_kind, gen_out;
  std::size_t gen_m = 0;
  std::optional<std::size_t> gen_n, gen_rank;
  std::uint64_t gen_p = kDefaultModulus, gen_seed = 1;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a matrix file");
  gen_cmd->add_option("kind", gen_kind, "identity, swap, antidiag, random, nonsingular, rankdef")->required();
  gen_cmd->add_option("m", gen_m, "Rows")->required();
  gen_cmd->add_option("n", gen_n, "Columns (default m)");
  gen_cmd->add_option("--rank", gen_rank, "Rank for rankdef");
  gen_cmd->add_option("--modulus", gen_p, "Field characteristic");
  gen_cmd->add_option("--seed", gen_seed, "Seed");
  gen_cmd->add_option("-o,--output", gen_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kAbort;
  }

  try {
    if (*run_cmd) {
      const auto id = run_args.id();
      const auto in = run_args.inputs();
      const auto e = proto::execute_honest(id, in, run_seed);
      const auto r = report(id, in, run_seed, e);
      if (run_json)
        std::cout << r.dump(2) << '\n';
      else
        print_text(r);
      return exit_code(e.run.verdict);
    }
    if (*seal_cmd) {
      const auto id = seal_args.id();
      const auto in = seal_args.inputs();
      const auto s = proto::seal_honest(id, in);
      if (!s.execution.run.verdict.accepted()) {
        std::cerr << "seal: " << proto::to_string(s.execution.run.verdict.status) << " ("
                  << proto::to_string(s.execution.run.verdict.cause) << ") " << s.execution.run.verdict.detail << '\n';
        return exit_code(s.execution.run.verdict);
      }
      std::ofstream out(seal_out, std::ios::binary);
      if (!out) throw Usage("cannot write " + seal_out);
      out.write(reinterpret_cast<const char*>(s.blob.data()), static_cast<std::streamsize>(s.blob.size()));
      std::cout << "sealed " << s.blob.size() << " bytes\n";
      return kAccept;
    }
    if (*check_cmd) {
      const auto id = check_args.id();
      const auto in = check_args.inputs();
      const auto blob = read_bytes(check_blob);
      const auto e = proto::check(id, in, blob);
      const auto r = report(id, in, 0, e);
      if (check_json)
        std::cout << r.dump(2) << '\n';
      else
        print_text(r);
      return exit_code(e.run.verdict);
    }
    if (*attack_cmd) {
      if (!adversary::attack_info(attack_name)) throw Usage("unknown adversary: " + attack_name);
      if (attack_trials == 0) throw Usage("--trials must be positive");
      const auto r = adversary::run_attack(attack_name, attack_p, attack_trials, attack_seed);
      if (attack_json) {
        json j = {{"adversary", r.name}, {"p", r.modulus},       {"seed", attack_seed},
                  {"trials", r.trials},  {"accepted", r.accepted}, {"rejected", r.rejected},
                  {"aborted", r.aborted}, {"rate", r.rate},       {"bound", r.bound},
                  {"threshold", r.threshold}, {"pass", r.pass}};
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << r.name << " over F_" << r.modulus << ": " << r.accepted << "/" << r.trials << " accepted, rate "
                  << r.rate << ", bound " << r.bound << ", bound + 3 sigma " << r.threshold << ": "
                  << (r.pass ? "PASS" : "FAIL") << '\n';
      }
      return r.pass ? kAccept : kReject;
    }
    if (*bench_cmd) {
      if (bench_n == 0) throw Usage("n must be positive");
      if (bench_n > bench_cap) throw Usage("n exceeds --cap " + std::to_string(bench_cap));
      const auto b = bench(bench_n, bench_p, bench_repeat, bench_seed);
      if (bench_json)
        std::cout << b.dump(2) << '\n';
      else
        print_bench(b);
      return kAccept;
    }
    if (*gen_cmd) {
      const PrimeField f(gen_p);
      const auto a = generate(gen_kind, gen_m, gen_n.value_or(gen_m), gen_rank, f, gen_seed);
      if (gen_out.empty()) {
        la::write_matrix(std::cout, a);
      } else {
        std::ofstream out(gen_out);
        if (!out) throw Usage("cannot write " + gen_out);
        la::write_matrix(out, a);
      }
      return kAccept;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kAbort;
  }
  return kAbort;
}
