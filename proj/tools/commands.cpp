#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "besovop/besov.hpp"
#include "besovop/error.hpp"
#include "besovop/schur.hpp"
#include "besovop/spectral.hpp"
#include "cli.hpp"

namespace besovop::cli {
namespace {

std::string path_in(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.out) / name).string();
}

// Flattened key,value CSV of a JSON report.
std::string flat_csv(const nlohmann::json& j) {
  std::ostringstream s;
  s << "key,value\n";
  for (const auto& [key, v] : j.flatten().items()) {
    s << key << ',';
    if (v.is_number_float()) s << format_double(v.get<double>());
    else if (v.is_string()) s << v.get<std::string>();
    else s << v.dump();
    s << '\n';
  }
  return s.str();
}

void emit_report(const RunConfig& c, const std::string& name, const nlohmann::json& j, std::ostream& log) {
  const std::string path = path_in(c, name + (c.format == "csv" ? ".csv" : ".json"));
  if (c.format == "csv") write_text(path, flat_csv(j));
  else write_json(path, j);
  log << "wrote " << path << "\n";
}

void emit_csv(const RunConfig& c, const std::string& name, const std::string& text, std::ostream& log) {
  const std::string path = path_in(c, name);
  write_text(path, text);
  log << "wrote " << path << "\n";
}

nlohmann::json grid_json(const DyadicGrid& g) { return {{"levels", g.levels}, {"a", g.a}, {"b", g.b}}; }

nlohmann::json kernel_json(const SampledKernel& k) {
  return {{"label", k.label}, {"grid_x", grid_json(k.grid_x)}, {"grid_y", grid_json(k.grid_y)},
          {"l2_norm", k.l2_norm()}, {"sup_norm", k.sup_norm()}};
}

double p_or(const RunConfig& c, double fallback) { return c.p.value_or(fallback); }

std::size_t count_param(const RunConfig& c, const std::string& name, std::size_t fallback) {
  auto it = c.params.find(name);
  if (it == c.params.end()) return fallback;
  if (!(it->second >= 0.0) || it->second != std::floor(it->second))
    throw UsageError("--param " + name + " must be a nonnegative integer");
  return static_cast<std::size_t>(it->second);
}

int cmd_filters(const RunConfig& c, std::ostream& log) {
  nlohmann::json list = nlohmann::json::array();
  std::ostringstream csv;
  csv << "filter,index,lowpass,highpass\n";
  for (int n = 1; n <= kMaxVanishingMoments; ++n) {
    const WaveletFilter f = build_filter(WaveletFamily::Daubechies, n);
    list.push_back({{"label", f.label()},
                    {"vanishing_moments", n},
                    {"support_length", f.support_length()},
                    {"lowpass", f.lowpass},
                    {"highpass", f.highpass}});
    for (std::size_t i = 0; i < f.taps(); ++i)
      csv << f.label() << ',' << i << ',' << format_double(f.lowpass[i]) << ',' << format_double(f.highpass[i])
          << '\n';
  }
  if (c.format == "csv") emit_csv(c, "filters.csv", csv.str(), log);
  else emit_report(c, "filters", {{"config", c.to_json()}, {"filters", list}}, log);
  return kPass;
}

int cmd_synth(const RunConfig& c, std::ostream& log) {
  if (!c.kernel.empty()) throw UsageError("synth builds kernels from --family; --kernel is not accepted");
  const KernelSpec spec = kernel_spec(c);
  const DyadicGrid g{c.levels, 0.0, 1.0};
  nlohmann::json truth{{"config", c.to_json()}, {"family", to_string(spec.family)}, {"parameters", spec.parameters}};
  SampledKernel k;
  if (spec.family == KernelFamily::WaveletSynthetic || spec.family == KernelFamily::FractionalRough) {
    const SynthesisResult r = synthesize_builtin(spec, g, g);
    k = r.kernel;
    int lo = r.planted.front().j, hi = lo;
    for (const auto& pc : r.planted) {
      lo = std::min(lo, pc.j);
      hi = std::max(hi, pc.j);
    }
    const double alpha = spec.parameters.at("alpha");
    const double p = spec.parameters.count("p") ? spec.parameters.at("p") : 1.0;
    truth["planted"] = {{"count", r.planted.size()}, {"levels", {lo, hi}}};
    truth["besov"] = {{"s", alpha}, {"p", p}, {"q", p}, {"value_norm", "L2"}, {"seminorm", r.ground_truth}};
  } else {
    k = sample_builtin(spec, g, g);
  }
  truth["kernel"] = kernel_json(k);
  const std::string kernel_path = path_in(c, k.label + ".kernel");
  write_kernel(kernel_path, k);
  log << "wrote " << kernel_path << "\n";
  const std::string truth_path = path_in(c, k.label + ".truth.json");
  write_json(truth_path, truth);
  log << "wrote " << truth_path << "\n";
  return kPass;
}

int cmd_dwt(const RunConfig& c, std::ostream& log) {
  const SampledKernel k = input_kernel(c);
  const WaveletFilter f = parse_filter(c.filter);
  const int j0 = static_cast<int>(count_param(c, "j0", 0));
  const CoefficientField field = analyze_kernel(k, f, j0);
  const Matrix back = synthesize_field(field);
  double err = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) err = std::max(err, std::abs(back.data()[i] - k.values.data()[i]));
  const double kernel_energy = k.l2_norm() * k.l2_norm();
  nlohmann::json levels = nlohmann::json::array();
  std::ostringstream csv;
  csv << "j,energy\n";
  for (int j = field.coarsest_level; j < field.levels; ++j) {
    double e = 0.0;
    for (double v : field.detail(j).data()) e += v * v;
    e *= field.y_spacing();
    levels.push_back({{"j", j}, {"energy", e}});
    csv << j << ',' << format_double(e) << '\n';
  }
  emit_csv(c, "dwt_levels.csv", csv.str(), log);
  emit_report(c, "dwt",
              {{"config", c.to_json()},
               {"kernel", kernel_json(k)},
               {"filter", f.label()},
               {"coarsest_level", j0},
               {"levels", levels},
               {"energy", field.energy()},
               {"kernel_energy", kernel_energy},
               {"parseval_relative_error",
                kernel_energy > 0.0 ? std::abs(field.energy() - kernel_energy) / kernel_energy : 0.0},
               {"roundtrip_max_error", err}},
              log);
  return kPass;
}

int cmd_besov(const RunConfig& c, std::ostream& log) {
  const SampledKernel k = input_kernel(c);
  const WaveletFilter f = parse_filter(c.filter);
  const int j0 = static_cast<int>(count_param(c, "j0", 0));
  const double p = p_or(c, 1.0);
  const double q = c.q.value_or(p);
  if (!c.alpha && !(p < 2.0)) throw UsageError("--alpha is required when p >= 2");
  const double s = c.alpha.value_or(1.0 / p - 0.5);
  const CoefficientField field = analyze_kernel(k, f, j0);

  std::ostringstream coeffs;
  coeffs << "j,k,norm\n";
  for (const CoefficientNorm& n : coefficient_norms(field, ValueNorm::L2))
    coeffs << n.j << ',' << n.k << ',' << format_double(n.norm) << '\n';
  emit_csv(c, "coeffs.csv", coeffs.str(), log);

  const NonnegSeq e = approx_numbers(field);
  std::ostringstream approx, loglog;
  approx << "n,error\n";
  loglog << "log10_n,log10_error\n";
  for (std::size_t n = 0; n < e.size(); ++n) {
    approx << n << ',' << format_double(e[n]) << '\n';
    if (e[n] > 0.0)
      loglog << format_double(std::log10(static_cast<double>(n + 1))) << ',' << format_double(std::log10(e[n]))
             << '\n';
  }
  emit_csv(c, "approx.csv", approx.str(), log);
  emit_csv(c, "approx_loglog.csv", loglog.str(), log);

  nlohmann::json report{{"config", c.to_json()},
                        {"kernel", kernel_json(k)},
                        {"filter", f.label()},
                        {"params", {{"s", s}, {"p", p}, {"q", std::isinf(q) ? nlohmann::json("inf") : nlohmann::json(q)}}},
                        {"entry_count", field.entry_count()}};
  report["seminorm"] = {{"L2", besov_seminorm(field, BesovParams{s, p, q, ValueNorm::L2})},
                        {"Linf", besov_seminorm(field, BesovParams{s, p, q, ValueNorm::Linf})}};
  if (p < 2.0 && k.l2_norm() > 0.0) {
    const NonlinearReport r = verify_nonlinear_equivalence(k, f, p, j0);
    report["nonlinear"] = {{"alpha", r.alpha},       {"approx_quasinorm", r.approx_quasinorm},
                           {"l2_norm", r.l2_norm},   {"seminorm", r.seminorm},
                           {"rhs", r.rhs},           {"ratio", r.ratio},
                           {"coefficient_ell_p", r.coefficient_ell_p}};
  }
  emit_report(c, "besov", report, log);
  return kPass;
}

int cmd_spectrum(const RunConfig& c, std::ostream& log) {
  const SampledKernel k = input_kernel(c);
  const double p = p_or(c, 1.0);
  const SingularSpectrum s = singular_values(discretize(k));

  std::ostringstream csv, loglog;
  csv << "n,mu\n";
  loglog << "log10_n,log10_mu\n";
  for (std::size_t n = 0; n < s.size(); ++n) {
    csv << n << ',' << format_double(s.mu[n]) << '\n';
    if (s.mu[n] > 0.0)
      loglog << format_double(std::log10(static_cast<double>(n + 1))) << ',' << format_double(std::log10(s.mu[n]))
             << '\n';
  }
  emit_csv(c, "spectrum.csv", csv.str(), log);
  emit_csv(c, "spectrum_loglog.csv", loglog.str(), log);

  const FitRange range = middle_decade(s.size());
  nlohmann::json decay{{"config", c.to_json()}, {"fit_range", {range.first, range.last}}, {"length", s.size()}};
  try {
    decay["exponent"] = decay_rate(s, range);
  } catch (const Error& e) {
    decay["exponent"] = nullptr;
    decay["error"] = e.what();
  }
  write_json(path_in(c, "decay.json"), decay);
  log << "wrote " << path_in(c, "decay.json") << "\n";

  nlohmann::json report{{"config", c.to_json()},
                        {"kernel", kernel_json(k)},
                        {"p", p},
                        {"schatten_p", schatten(s, p)},
                        {"rank", s.rank()},
                        {"length", s.size()}};
  if (s.size() >= 3) {
    const RatioCheck m = check_mu_estimate(s);
    report["mu_estimate"] = {{"value", m.value}, {"degenerate", m.degenerate}, {"worst_index", m.worst_index}};
  }
  if (p < 2.0 && s.size() > 0 && s.mu[0] > 0.0) {
    const double q = c.q.value_or(p);
    const RatioCheck r = check_lpq_equivalence(s, p, q);
    report["lpq_ratio"] = {{"q", std::isinf(q) ? nlohmann::json("inf") : nlohmann::json(q)},
                           {"value", r.value},
                           {"degenerate", r.degenerate}};
  }
  emit_report(c, "spectrum", report, log);
  return kPass;
}

int cmd_schur(const RunConfig& c, std::ostream& log) {
  const SampledKernel k = input_kernel(c);
  const WaveletFilter f = parse_filter(c.filter);
  const double p = p_or(c, 1.0);
  SchurOptions opt;
  opt.seed = c.seed;
  opt.samples = count_param(c, "samples", opt.samples);
  opt.ascent_steps = count_param(c, "ascent_steps", opt.ascent_steps);
  opt.strips = count_param(c, "strips", opt.strips);
  opt.coarsest_level = static_cast<int>(count_param(c, "j0", 0));
  const SchurReport r = besov_schur_estimate(k, f, p, opt);

  nlohmann::json strips = nlohmann::json::array();
  for (const StripBound& s : r.partition.strips)
    strips.push_back({{"first_row", s.first_row}, {"last_row", s.last_row}, {"value", s.value}, {"method", s.method}});
  nlohmann::json report{{"config", c.to_json()},
                        {"kernel", kernel_json(k)},
                        {"filter", f.label()},
                        {"label", r.label},
                        {"p", r.p},
                        {"p_flat", p_flat(r.p)},
                        {"seed", r.seed},
                        {"bounded_norm", r.bounded_norm},
                        {"lower_bound", r.lower.value},
                        {"witness", {{"best_sample", r.lower.best_sample}, {"file", "witness.csv"}}},
                        {"upper_bounds",
                         {{"partition", r.partition.value},
                          {"wavelet_slice", r.wavelet_slice.value},
                          {"besov", r.besov_upper}}},
                        {"partition_strips", strips},
                        {"wavelet_slice",
                         {{"scaling_part", r.wavelet_slice.scaling_part},
                          {"level_values", r.wavelet_slice.level_values},
                          {"constant", r.wavelet_slice.constant}}},
                        {"seminorm", r.seminorm},
                        {"rhs", r.rhs},
                        {"empirical_constant", r.empirical_constant},
                        {"heuristic", r.heuristic},
                        {"consistent", r.consistent}};
  std::ostringstream csv;
  csv << "index,xi,eta\n";
  const std::size_t len = std::max(r.lower.xi.size(), r.lower.eta.size());
  for (std::size_t i = 0; i < len; ++i) {
    csv << i << ',';
    if (i < r.lower.xi.size()) csv << format_double(r.lower.xi[i]);
    csv << ',';
    if (i < r.lower.eta.size()) csv << format_double(r.lower.eta[i]);
    csv << '\n';
  }
  emit_csv(c, "witness.csv", csv.str(), log);
  // The report is always JSON; --format csv adds a flattened copy.
  write_json(path_in(c, "schur.json"), report);
  log << "wrote " << path_in(c, "schur.json") << "\n";
  if (c.format == "csv") emit_csv(c, "schur.csv", flat_csv(report), log);
  return kPass;
}

int cmd_verify(const RunConfig& c, std::ostream& log) {
  if (c.suite.empty()) throw UsageError("verify needs a suite name");
  const SuiteResult r = run_suite(c);
  const std::string path = path_in(c, "verify_" + c.suite + ".json");
  write_json(path, r.report);
  log << c.suite << ": " << (r.pass ? "pass" : "FAIL");
  if (r.report.contains("worst_ratio")) log << " (worst_ratio " << r.report["worst_ratio"].dump() << ")";
  log << "\nwrote " << path << "\n";
  return r.pass ? kPass : kRuntimeFailure;
}

}  // namespace

KernelSpec kernel_spec(const RunConfig& c) {
  if (c.family.empty()) throw UsageError("--family or --kernel is required");
  KernelSpec spec;
  spec.family = parse_family(c.family);
  if (spec.family == KernelFamily::File) throw UsageError("use --kernel to read kernel files");
  switch (spec.family) {
    case KernelFamily::SeparableGaussian:
      spec.parameters = {{"c1", 0.5}, {"c2", 0.5}, {"sigma1", 0.15}, {"sigma2", 0.15}};
      break;
    case KernelFamily::TensorBump:
      spec.parameters = {{"amplitude", 1.0}, {"c1", 0.5}, {"c2", 0.5}, {"w1", 0.3}, {"w2", 0.3}};
      break;
    default:
      break;
  }
  if (c.alpha) spec.parameters["alpha"] = *c.alpha;
  if (c.p) spec.parameters["p"] = *c.p;
  for (const auto& [name, value] : c.params) spec.parameters[name] = value;
  spec.seed = c.seed;
  spec.label = c.label;
  return spec;
}

SampledKernel input_kernel(const RunConfig& c) {
  if (!c.kernel.empty()) return load_kernel(c.kernel);
  const DyadicGrid g{c.levels, 0.0, 1.0};
  return sample_builtin(kernel_spec(c), g, g);
}

int run_command(const RunConfig& c, std::ostream& log) {
  std::error_code ec;
  std::filesystem::create_directories(c.out, ec);
  if (ec) throw Error(ErrorCode::FileNotFound, "cannot create output directory '" + c.out + "'");
  if (c.command == "filters") return cmd_filters(c, log);
  if (c.command == "synth") return cmd_synth(c, log);
  if (c.command == "dwt") return cmd_dwt(c, log);
  if (c.command == "besov") return cmd_besov(c, log);
  if (c.command == "spectrum") return cmd_spectrum(c, log);
  if (c.command == "schur") return cmd_schur(c, log);
  if (c.command == "verify") return cmd_verify(c, log);
  throw UsageError("unknown command '" + c.command + "'");
}

}  // namespace besovop::cli
