#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "besovop/error.hpp"

namespace besovop::cli {
namespace {

double parse_real(const std::string& text, const std::string& what) {
  if (text == "inf" || text == "infinity") return HUGE_VAL;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw UsageError(what + ": '" + text + "' is not a number");
  return v;
}

double json_real(const nlohmann::json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_real(v.get<std::string>(), key);
  throw UsageError("config key '" + key + "' must be a number");
}

nlohmann::json real_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

bool is_usage_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::UnsupportedOrder:
    case ErrorCode::UnknownFamily:
    case ErrorCode::ParameterMissing:
    case ErrorCode::InvalidExponent:
    case ErrorCode::InvalidBesovParams:
    case ErrorCode::FileNotFound:
    case ErrorCode::EmptyPartition:
      return true;
    default:
      return false;
  }
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j{{"command", command},
                   {"seed", seed},
                   {"levels", levels},
                   {"filter", filter},
                   {"out", out},
                   {"format", format},
                   {"seeds", std::to_string(seed_first) + ".." + std::to_string(seed_last)},
                   {"n", n},
                   {"profile", profile}};
  if (!suite.empty()) j["suite"] = suite;
  if (p) j["p"] = real_or_inf(*p);
  if (q) j["q"] = real_or_inf(*q);
  if (alpha) j["alpha"] = *alpha;
  if (!family.empty()) j["family"] = family;
  if (!kernel.empty()) j["kernel"] = kernel;
  if (!label.empty()) j["label"] = label;
  if (!params.empty()) j["params"] = params;
  return j;
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  std::uint64_t a = 0, b = 0;
  auto parse = [&](std::string_view s, std::uint64_t& v) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
  };
  const std::string_view all(text);
  const bool ok = dots == std::string::npos ? parse(all, a) && parse(all, b)
                                            : parse(all.substr(0, dots), a) && parse(all.substr(dots + 2), b);
  if (!ok || b < a) throw UsageError("--seeds expects 'a..b' with a <= b, got '" + text + "'");
  return {a, b};
}

void apply_config_json(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "command") c.command = v.get<std::string>();
      else if (key == "suite") c.suite = v.get<std::string>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "levels" || key == "J") c.levels = v.get<int>();
      else if (key == "filter") c.filter = v.get<std::string>();
      else if (key == "p") c.p = json_real(v, key);
      else if (key == "q") c.q = json_real(v, key);
      else if (key == "alpha") c.alpha = json_real(v, key);
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "format") c.format = v.get<std::string>();
      else if (key == "family") c.family = v.get<std::string>();
      else if (key == "kernel") c.kernel = v.get<std::string>();
      else if (key == "label") c.label = v.get<std::string>();
      else if (key == "seeds") std::tie(c.seed_first, c.seed_last) = parse_seed_range(v.get<std::string>());
      else if (key == "n") c.n = v.get<std::size_t>();
      else if (key == "profile") c.profile = v.get<std::string>();
      else if (key == "params") {
        for (const auto& [name, value] : v.items()) c.params[name] = json_real(value, name);
      } else
        throw UsageError("unknown config key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("config key '" + key + "': " + e.what());
    }
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::FormatError, "write to '" + path + "' failed");
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

int run(int argc, const char* const* argv, std::ostream& log, std::ostream& err) {
  CLI::App app{"Besov regularity, spectra and Schur multipliers of sampled kernels", "besovop"};
  std::string command, suite, config_path, p_text, q_text, seeds_text;
  std::vector<std::string> param_text;
  RunConfig flags;
  double alpha = 0.0;

  app.add_option("command", command, "filters, synth, dwt, besov, spectrum, schur or verify")->required();
  app.add_option("suite", suite, "verification suite (verify only)");
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  auto* seed_opt = app.add_option("--seed", flags.seed, "master seed");
  auto* levels_opt = app.add_option("-J,--levels", flags.levels, "2^J grid points per axis");
  auto* filter_opt = app.add_option("--filter", flags.filter, "haar, daubechies:N or dbN");
  auto* p_opt = app.add_option("--p", p_text, "inner exponent / Schatten index");
  auto* q_opt = app.add_option("--q", q_text, "outer exponent (inf allowed)");
  auto* alpha_opt = app.add_option("--alpha", alpha, "smoothness");
  auto* out_opt = app.add_option("--out", flags.out, "output directory");
  auto* format_opt = app.add_option("--format", flags.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  auto* family_opt = app.add_option("--family", flags.family, "built-in kernel family");
  auto* kernel_opt = app.add_option("--kernel", flags.kernel, "input kernel file");
  auto* label_opt = app.add_option("--label", flags.label, "label of synthesized kernels");
  auto* seeds_opt = app.add_option("--seeds", seeds_text, "seed range a..b");
  auto* n_opt = app.add_option("-n", flags.n, "matrix size / sequence length");
  auto* profile_opt = app.add_option("--profile", flags.profile, "hardy profile: geometric, power, seeded or all");
  auto* param_opt = app.add_option("--param", param_text, "family parameter name=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, log, err);
    return code == 0 ? kPass : kUsageError;
  }

  try {
    RunConfig c;
    if (!config_path.empty()) {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) throw UsageError("cannot read config file '" + config_path + "'");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw UsageError("config file '" + config_path + "': " + e.what());
      }
      apply_config_json(c, j);
    }
    c.command = command;
    if (!suite.empty()) c.suite = suite;
    if (seed_opt->count()) c.seed = flags.seed;
    if (levels_opt->count()) c.levels = flags.levels;
    if (filter_opt->count()) c.filter = flags.filter;
    if (p_opt->count()) c.p = parse_real(p_text, "--p");
    if (q_opt->count()) c.q = parse_real(q_text, "--q");
    if (alpha_opt->count()) c.alpha = alpha;
    if (out_opt->count()) c.out = flags.out;
    if (format_opt->count()) c.format = flags.format;
    if (family_opt->count()) c.family = flags.family;
    if (kernel_opt->count()) c.kernel = flags.kernel;
    if (label_opt->count()) c.label = flags.label;
    if (seeds_opt->count()) std::tie(c.seed_first, c.seed_last) = parse_seed_range(seeds_text);
    if (n_opt->count()) c.n = flags.n;
    if (profile_opt->count()) c.profile = flags.profile;
    if (param_opt->count())
      for (const std::string& kv : param_text) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--param expects name=value, got '" + kv + "'");
        c.params[kv.substr(0, eq)] = parse_real(kv.substr(eq + 1), "--param " + kv.substr(0, eq));
      }
    if (c.format != "json" && c.format != "csv") throw UsageError("--format must be json or csv");
    if (c.levels < 1 || c.levels > 14) throw UsageError("-J must lie in [1, 14]");
    return run_command(c, log);
  } catch (const UsageError& e) {
    err << "besovop: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "besovop: " << e.what() << "\n";
    return is_usage_code(e.code()) ? kUsageError : kRuntimeFailure;
  } catch (const std::exception& e) {
    err << "besovop: " << e.what() << "\n";
    return kRuntimeFailure;
  }
}

}  // namespace besovop::cli
