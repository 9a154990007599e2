#pragma once

// Subcommands of the `vlres` tool. Kept in a header so the test suite can
// drive them in-process with captured streams.
//
// Exit codes: 0 success, 1 validation failure, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "vlres/vlres.hpp"

namespace vlres::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes `data` to `path` via a temporary file and rename, so a failed run
/// never leaves a partial file behind. "-" writes to `out`.
inline void write_atomically(const std::string& path, const std::string& data, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << data;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot write " + path);
    f << data;
    if (!f.flush()) throw UsageError("cannot write " + path);
  }
  std::filesystem::rename(tmp, path);
}

inline std::vector<Scheme> parse_schemes(const std::string& text) {
  std::vector<Scheme> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    const std::string s = text.substr(pos, end - pos);
    if (s == "f2v") out.push_back(Scheme::f2v);
    else if (s == "b2b") out.push_back(Scheme::b2b);
    else throw UsageError("unknown scheme \"" + s + "\"");
    pos = end + 1;
  }
  return out;
}

inline std::vector<unsigned> parse_uints(const std::string& text) {
  std::vector<unsigned> out;
  for (double v : parse_reals(text)) {
    if (v < 0 || v != static_cast<double>(static_cast<unsigned>(v))) {
      throw UsageError("expected non-negative integers, got \"" + text + "\"");
    }
    out.push_back(static_cast<unsigned>(v));
  }
  return out;
}

// --- curve -------------------------------------------------------------------

struct CurveArgs {
  std::string p;
  std::vector<unsigned> m;
  std::string n_list;
  std::string grid_table;
  std::string schemes = "f2v,b2b";
  std::vector<std::string> extra_sizes;
  std::string out = "-";
  std::string gnuplot;
  unsigned jobs = 1;
  bool round_size = false;
};

inline int run_curve(const CurveArgs& a, std::ostream& out, std::ostream& err) {
  const Pmf p = parse_distribution(a.p);
  const auto schemes = parse_schemes(a.schemes);
  GridTable table;
  if (!a.grid_table.empty()) {
    if (a.grid_table != "default") throw UsageError("unknown grid table \"" + a.grid_table + "\"");
    if (!a.n_list.empty()) throw UsageError("--grid-table and --n-list are exclusive");
    table = default_grid_table();
    if (!a.m.empty()) {
      GridTable picked;
      for (unsigned m : a.m) {
        if (!table.count(m)) throw UsageError("m=" + std::to_string(m) + " is not in the grid table");
        picked[m] = table[m];
      }
      table = std::move(picked);
    }
  } else if (!a.n_list.empty()) {
    if (a.m.empty()) throw UsageError("--n-list needs at least one --m");
    const auto ns = parse_uints(a.n_list);
    for (unsigned m : a.m) table[m] = ns;
  } else if (a.m.empty() || a.extra_sizes.empty()) {
    throw UsageError("give --grid-table, or --m with --n-list and/or --extra-size");
  }

  std::vector<GridPoint> points = expand_grid(table, schemes, p.alphabet_size(), a.round_size);

  std::vector<unsigned> ms = a.m;
  if (ms.empty()) {
    for (const auto& [m, ns] : table) ms.push_back(m);
  }
  const bool has_f2v = std::find(schemes.begin(), schemes.end(), Scheme::f2v) != schemes.end();
  for (const auto& entry : a.extra_sizes) {
    if (!has_f2v) throw UsageError("--extra-size needs the f2v scheme");
    const auto colon = entry.find(':');
    std::vector<unsigned> targets = ms;
    std::string size_text = entry;
    if (colon != std::string::npos) {
      targets = parse_uints(entry.substr(0, colon));
      size_text = entry.substr(colon + 1);
    }
    const auto sizes = parse_uints(size_text);
    if (sizes.size() != 1) throw UsageError("bad --extra-size \"" + entry + "\"");
    std::uint64_t n = sizes.front();
    if (!tunstall::is_valid_size(p.alphabet_size(), n)) {
      if (!a.round_size) throw UsageError("N=" + std::to_string(n) + " is not a valid Tunstall size");
      n = tunstall::floor_valid_size(p.alphabet_size(), n);
    }
    for (unsigned m : targets) points.push_back({Scheme::f2v, m, n});
  }
  if (points.empty()) throw UsageError("no grid points");

  const auto rows = run_sweep(p, points, a.jobs);
  write_atomically(a.out, curve_csv(rows), out);
  if (!a.gnuplot.empty()) write_atomically(a.gnuplot, curve_gnuplot(rows), out);
  err << "wrote " << rows.size() << " rows\n";
  return kExitOk;
}

// --- generate / validate -------------------------------------------------------

struct GenerateArgs {
  std::string p;
  unsigned m = 0;
  std::uint64_t size = 0;
  std::optional<std::uint64_t> symbols;
  std::optional<std::uint64_t> seed;
  std::string bits_file;
  std::string bits_format = "auto";
  std::string format = "text";
  std::string out = "-";
  bool round_size = false;
  double tv_threshold = 0.01;
};

inline ResolutionCode code_from_args(const std::string& dist, unsigned m, std::uint64_t size, bool round_size) {
  const Pmf p = parse_distribution(dist);
  if (!tunstall::is_valid_size(p.alphabet_size(), size)) {
    if (!round_size) throw UsageError("--size " + std::to_string(size) + " is not a valid Tunstall size");
    size = tunstall::floor_valid_size(p.alphabet_size(), size);
    if (size == 0) throw UsageError("no valid Tunstall size below --size");
  }
  return build_code(p, size, m);
}

inline std::unique_ptr<BitSource> bit_source_from_args(const GenerateArgs& a) {
  if (!a.bits_file.empty()) {
    if (a.seed) throw UsageError("--seed and --bits-file are exclusive");
    BitFileFormat f = BitFileFormat::automatic;
    if (a.bits_format == "raw") f = BitFileFormat::raw;
    else if (a.bits_format == "text") f = BitFileFormat::text;
    else if (a.bits_format != "auto") throw UsageError("--bits-format must be auto, raw or text");
    return std::make_unique<BufferBitSource>(load_bit_file(a.bits_file, f));
  }
  if (!a.seed) throw UsageError("--seed is required unless --bits-file is given");
  if (!a.symbols) throw UsageError("--symbols is required with --seed");
  return std::make_unique<PrngBitSource>(*a.seed);
}

/// Streams codewords until at least `symbols` output symbols (or, without
/// a target, until the bit source runs dry). `sink` sees each codeword index.
template <class Sink>
StreamStats pump(const ResolutionCode& code, BitSource& bits, std::optional<std::uint64_t> symbols, Sink&& sink) {
  StreamGenerator gen(code, bits);
  while (!symbols || gen.stats().output_symbols < *symbols) {
    const auto i = gen.next();
    if (!i) {
      if (symbols) throw SourceExhaustedError(gen.stats().codewords, gen.stats().output_symbols);
      break;
    }
    sink(*i);
  }
  return gen.stats();
}

inline void print_stats(const StreamStats& s, std::ostream& err) {
  err << "input_bits=" << s.input_bits << " output_symbols=" << s.output_symbols << " codewords=" << s.codewords
      << " empirical_rate=" << format_real(s.empirical_rate()) << '\n';
}

inline int run_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.format != "text" && a.format != "packed") throw UsageError("--format must be text or packed");
  const ResolutionCode code = code_from_args(a.p, a.m, a.size, a.round_size);
  auto bits = bit_source_from_args(a);

  std::ofstream file;
  std::ostream* dst = &out;
  if (!a.out.empty() && a.out != "-") {
    file.open(a.out, std::ios::binary | std::ios::trunc);
    if (!file) throw UsageError("cannot write " + a.out);
    dst = &file;
  }
  const bool text = a.format == "text";
  std::string buf;
  std::uint64_t column = 0;
  auto flush = [&]() {
    dst->write(buf.data(), static_cast<std::streamsize>(buf.size()));
    buf.clear();
  };
  auto sink = [&](std::size_t i) {
    for (Symbol s : code.codebook().leaf(i)) {
      if (text) {
        buf.push_back(symbol_char(s));
        if (++column == 64) {
          buf.push_back('\n');
          column = 0;
        }
      } else {
        buf.push_back(static_cast<char>(s));
      }
    }
    if (buf.size() >= (1U << 16)) flush();
  };
  StreamStats stats;
  try {
    stats = pump(code, *bits, a.symbols, sink);
  } catch (const SourceExhaustedError&) {
    if (text && column != 0) buf.push_back('\n');
    flush();
    throw;
  }
  if (text && column != 0) buf.push_back('\n');
  flush();
  print_stats(stats, err);
  return kExitOk;
}

inline int run_validate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  const ResolutionCode code = code_from_args(a.p, a.m, a.size, a.round_size);
  auto bits = bit_source_from_args(a);
  bool ok = true;

  if (code.m() <= 16) {
    const bool exact = induced_distribution(code, 16) == code.counts();
    out << "exhaustive_check=" << (exact ? "exact" : "MISMATCH") << " inputs=" << code.inputs() << '\n';
    ok = ok && exact;
  }

  const StreamStats stats = pump(code, *bits, a.symbols, [](std::size_t) {});
  if (stats.codewords == 0) throw UsageError("no codewords generated");
  std::vector<double> empirical(code.size());
  for (std::size_t i = 0; i < code.size(); ++i) {
    empirical[i] = static_cast<double>(stats.leaf_counts[i]) / static_cast<double>(stats.codewords);
  }
  const double tv = variational_distance(code.counts(), empirical);
  const RateReport report = rate_report(code);
  const bool tv_ok = tv <= a.tv_threshold;
  ok = ok && tv_ok;
  out << "codewords=" << stats.codewords << " output_symbols=" << stats.output_symbols << '\n'
      << "tv=" << format_real(tv) << " threshold=" << format_real(a.tv_threshold) << ' '
      << (tv_ok ? "ok" : "FAIL") << '\n'
      << "empirical_rate=" << format_real(stats.empirical_rate()) << " rate=" << format_real(report.rate) << '\n'
      << "result=" << (ok ? "PASS" : "FAIL") << '\n';
  print_stats(stats, err);
  return ok ? kExitOk : kExitValidation;
}

// --- quantize / code / report ------------------------------------------------

struct QuantizeArgs {
  std::string q;
  std::optional<std::uint64_t> denominator;
  std::optional<unsigned> bits;
  bool brute_force = false;
};

inline int run_quantize(const QuantizeArgs& a, std::ostream& out, std::ostream&) {
  const std::vector<double> q = parse_reals(a.q);
  if (a.denominator.has_value() == a.bits.has_value()) throw UsageError("give exactly one of --M and --m");
  std::uint64_t m = 0;
  if (a.bits) {
    if (*a.bits > kMaxInputBits) throw UsageError("--m must be at most 62");
    m = std::uint64_t{1} << *a.bits;
  } else {
    m = *a.denominator;
  }
  const TypedPmf t = a.brute_force ? mtype::brute_force_quantize(q, m) : mtype::quantize(q, m);
  out << "M=" << t.denominator() << "\ncounts=";
  for (std::size_t i = 0; i < t.size(); ++i) out << (i ? "," : "") << t.count(i);
  out << "\nkl_bits=" << format_real(kl_divergence(t, q)) << '\n';
  return kExitOk;
}

struct CodeArgs {
  std::string scheme = "f2v";
  std::string p;
  unsigned m = 0;
  std::uint64_t size = 0;  ///< N for f2v, block length n for b2b
  bool round_size = false;
  std::string out = "-";
};

inline ResolutionCode code_from_args(const CodeArgs& a) {
  if (a.scheme == "f2v") return code_from_args(a.p, a.m, a.size, a.round_size);
  if (a.scheme == "b2b") return build_block_code(parse_distribution(a.p), static_cast<std::size_t>(a.size), a.m);
  throw UsageError("--scheme must be f2v or b2b");
}

inline int run_code(const CodeArgs& a, std::ostream& out, std::ostream&) {
  write_atomically(a.out, code_to_json(code_from_args(a)).dump() + "\n", out);
  return kExitOk;
}

inline int run_report(const CodeArgs& a, std::ostream& out, std::ostream&) {
  const RateReport r = rate_report(code_from_args(a));
  out << "scheme=" << to_string(r.scheme) << " m=" << r.m << " N=" << r.n_codewords << '\n'
      << "n_bits=" << format_real(r.n_bits) << " q=" << format_real(r.q) << '\n'
      << "exp_len=" << format_real(r.exp_len) << " target_exp_len=" << format_real(r.target_exp_len) << '\n'
      << "rate=" << format_real(r.rate) << " entropy_rate=" << format_real(r.entropy_rate)
      << " hv_rate=" << format_real(r.hv_rate) << " M_X=" << r.min_type_order << '\n'
      << "kl_bits=" << format_real(r.kl) << " kl_normalized=" << format_real(r.kl_normalized)
      << " kl_bound_bits=" << format_real(r.kl_bound) << '\n'
      << "H(P_X)=" << format_real(r.px_entropy) << " entropy_lower=" << format_real(r.entropy_lower)
      << " H(P_Y)=" << format_real(r.target_entropy) << '\n';
  bool ok = true;
  for (const auto& c : bound_suite(r)) {
    out << (c.applicable ? (c.passed ? "PASS " : "FAIL ") : "n/a  ") << c.name << '\n';
    ok = ok && c.passed;
  }
  return ok ? kExitOk : kExitValidation;
}

// --- entry point ---------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variable-length resolution codes: fair bits to DMS-like symbol streams"};
  app.require_subcommand(1);

  CurveArgs curve;
  auto* c = app.add_subcommand("curve", "rate/divergence sweep over (scheme, m, N), written as CSV");
  c->add_option("--p", curve.p, "target distribution, e.g. 0.211,0.789")->required();
  c->add_option("--m", curve.m, "input length in bits (repeatable)");
  c->add_option("--n-list", curve.n_list, "comma-separated n values used for every --m");
  c->add_option("--grid-table", curve.grid_table, "named (m, n) table; only 'default'");
  c->add_option("--schemes", curve.schemes, "comma-separated subset of f2v,b2b")->capture_default_str();
  c->add_option("--extra-size", curve.extra_sizes, "extra f2v codebook size N, or m:N (repeatable)");
  c->add_option("--out", curve.out, "CSV path, - for stdout")->capture_default_str();
  c->add_option("--emit-gnuplot", curve.gnuplot, "also write gnuplot data blocks to this path");
  c->add_option("--jobs", curve.jobs, "grid points evaluated concurrently")->capture_default_str();
  c->add_flag("--round-size", curve.round_size, "round invalid codebook sizes down");

  GenerateArgs gen;
  auto add_generate_options = [](CLI::App* s, GenerateArgs& g) {
    s->add_option("--p", g.p, "target distribution")->required();
    s->add_option("--m", g.m, "input bits per codeword")->required();
    s->add_option("--size", g.size, "Tunstall codebook size N")->required();
    s->add_option("--symbols", g.symbols, "stop once at least this many symbols are out");
    s->add_option("--seed", g.seed, "mt19937_64 seed");
    s->add_option("--bits-file", g.bits_file, "read input bits from a file instead");
    s->add_option("--bits-format", g.bits_format, "auto, raw or text")->capture_default_str();
    s->add_flag("--round-size", g.round_size, "round --size down to a valid Tunstall size");
  };
  auto* g = app.add_subcommand("generate", "emit a symbol stream");
  add_generate_options(g, gen);
  g->add_option("--format", gen.format, "text or packed")->capture_default_str();
  g->add_option("--out", gen.out, "output path, - for stdout")->capture_default_str();

  GenerateArgs val;
  auto* v = app.add_subcommand("validate", "check the generated codeword distribution");
  add_generate_options(v, val);
  v->add_option("--tv-threshold", val.tv_threshold, "largest accepted variational distance")
      ->capture_default_str();

  QuantizeArgs quant;
  auto* q = app.add_subcommand("quantize", "KL-optimal M-type quantization");
  q->add_option("--q,--p", quant.q, "distribution to quantize")->required();
  q->add_option("--M", quant.denominator, "denominator M");
  q->add_option("--m", quant.bits, "use M = 2^m");
  q->add_flag("--brute-force", quant.brute_force, "exhaustive search instead of greedy");

  CodeArgs code;
  CodeArgs report;
  auto add_code_options = [](CLI::App* s, CodeArgs& ca) {
    s->add_option("--scheme", ca.scheme, "f2v or b2b")->capture_default_str();
    s->add_option("--p", ca.p, "target distribution")->required();
    s->add_option("--m", ca.m, "input bits")->required();
    s->add_option("--size,--n", ca.size, "f2v: codebook size N; b2b: block length n")->required();
    s->add_flag("--round-size", ca.round_size, "round N down to a valid Tunstall size");
  };
  auto* cd = app.add_subcommand("code", "dump a resolution code as JSON");
  add_code_options(cd, code);
  cd->add_option("--out", code.out, "output path, - for stdout")->capture_default_str();
  auto* rp = app.add_subcommand("report", "rates, divergence and bound checks for one code");
  add_code_options(rp, report);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (c->parsed()) return run_curve(curve, out, err);
    if (g->parsed()) return run_generate(gen, out, err);
    if (v->parsed()) return run_validate(val, out, err);
    if (q->parsed()) return run_quantize(quant, out, err);
    if (cd->parsed()) return run_code(code, out, err);
    if (rp->parsed()) return run_report(report, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SourceExhaustedError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::internal ? kExitValidation : kExitUsage;
  }
  return kExitUsage;
}

}  // namespace vlres::cli
