#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "besovop/besov.hpp"
#include "besovop/error.hpp"
#include "besovop/parallel.hpp"
#include "besovop/random.hpp"
#include "besovop/schur.hpp"
#include "besovop/seqspace.hpp"
#include "besovop/spectral.hpp"
#include "cli.hpp"
#include "thresholds.hpp"

namespace besovop::cli {
namespace {

namespace th = thresholds;

struct Suite {
  nlohmann::json cases = nlohmann::json::array();
  std::vector<std::string> failures;
  double worst = 0.0;

  void fail(const std::string& label, const std::string& why) { failures.push_back(label + ": " + why); }
};

std::string seed_label(const char* prefix, std::uint64_t seed) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s-%04llu", prefix, static_cast<unsigned long long>(seed));
  return buf;
}

double drift(double coarse, double fine) { return std::abs(fine / coarse - 1.0); }

nlohmann::json real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

double param(const RunConfig& c, const std::string& name, double fallback) {
  auto it = c.params.find(name);
  return it == c.params.end() ? fallback : it->second;
}


void suite_hardy(const RunConfig& c, Suite& s) {
  const double r = param(c, "r", 0.5), mu = param(c, "mu", 2.0), sm = param(c, "s", 1.0), q = param(c, "q", 2.0);
  constexpr int kMinLevel = 6, kMaxLevel = 12;
  const std::size_t longest = std::size_t{1} << kMaxLevel;

  std::vector<std::pair<std::string, std::vector<double>>> profiles;
  auto want = [&](const char* name) { return c.profile == name || c.profile == "all"; };
  if (!want("geometric") && !want("power") && !want("seeded"))
    throw UsageError("--profile must be geometric, power, seeded or all");
  if (want("geometric")) {
    const double ratio = param(c, "ratio", 0.9);
    std::vector<double> b(longest);
    for (std::size_t k = 0; k < longest; ++k) b[k] = std::pow(ratio, static_cast<double>(k));
    profiles.emplace_back("geometric", std::move(b));
  }
  if (want("power")) {
    const double e = param(c, "exponent", 1.5);
    std::vector<double> b(longest);
    for (std::size_t k = 0; k < longest; ++k) b[k] = std::pow(static_cast<double>(k + 1), -e);
    profiles.emplace_back("power", std::move(b));
  }
  if (want("seeded"))
    for (std::uint64_t seed = c.seed_first; seed <= c.seed_last; ++seed) {
      Rng rng(derive_seed(seed, "hardy"));
      std::vector<double> b(longest);
      double v = 1.0;
      for (std::size_t k = 0; k < longest; ++k) {
        v *= std::pow((k + 1.0) / (k + 2.0), 1.2) * rng.uniform(0.8, 1.0);
        b[k] = v;
      }
      profiles.emplace_back(seed_label("seeded", seed), std::move(b));
    }

  for (const auto& [label, b] : profiles) {
    nlohmann::json lengths = nlohmann::json::array();
    double prev = 0.0, max_drift = 0.0;
    bool finite = true;
    for (int level = kMinLevel; level <= kMaxLevel; ++level) {
      const std::size_t len = std::size_t{1} << level;
      const double ratio = hardy_check(NonnegSeq(std::vector<double>(b.begin(), b.begin() + len)), r, mu, sm, q);
      finite = finite && std::isfinite(ratio);
      if (level > kMinLevel) max_drift = std::max(max_drift, drift(prev, ratio));
      prev = ratio;
      s.worst = std::max(s.worst, ratio);
      lengths.push_back({{"length", len}, {"ratio", real(ratio)}});
    }
    if (!finite) s.fail(label, "non-finite ratio");
    if (!(max_drift < th::kHardyDoublingDrift)) s.fail(label, "drift per doubling " + std::to_string(max_drift));
    s.cases.push_back({{"label", label}, {"lengths", lengths}, {"max_drift", real(max_drift)}});
  }
}


void add_mu_case(Suite& s, const std::string& label, const SingularSpectrum& mu) {
  const RatioCheck r = check_mu_estimate(mu);
  s.worst = std::max(s.worst, r.value);
  if (!(r.value <= th::kMuEstimateMax)) s.fail(label, "ratio " + std::to_string(r.value) + " > 1");
  s.cases.push_back({{"label", label}, {"ratio", r.value}, {"degenerate", r.degenerate}, {"worst_index", r.worst_index}});
}

void suite_mu_estimate(const RunConfig& c, Suite& s) {
  const std::size_t count = c.seed_last - c.seed_first + 1;
  std::vector<SingularSpectrum> spectra(count);
  parallel_for(count, [&](std::size_t i) {
    Rng rng(derive_seed(c.seed_first + i, "mu_estimate"));
    Matrix a(c.n, c.n);
    for (double& v : a.data()) v = rng.normal();
    spectra[i] = singular_values(a);
  });
  for (std::size_t i = 0; i < count; ++i) add_mu_case(s, seed_label("gaussian", c.seed_first + i), spectra[i]);
  for (const SampledKernel& k : corpus(c.levels)) add_mu_case(s, "corpus/" + k.label, singular_values(discretize(k)));
}


void suite_lpq(const RunConfig& c, Suite& s) {
  constexpr int kMinLevel = 8, kMaxLevel = 12;
  const std::size_t longest = std::size_t{1} << kMaxLevel;
  std::vector<double> ps{0.5, 1.0, 1.5};
  if (c.p) ps = {*c.p};
  for (double p : ps) {
    std::vector<std::pair<std::string, std::vector<double>>> spectra;
    std::vector<double> power(longest);
    for (std::size_t n = 0; n < longest; ++n) power[n] = std::pow(n + 1.0, -1.0 / p - 0.5);
    spectra.emplace_back("power", power);
    for (std::uint64_t seed = c.seed_first; seed <= c.seed_last; ++seed) {
      Rng rng(derive_seed(seed, "lpq"));
      std::vector<double> v = power;
      for (double& x : v) x *= rng.uniform(0.5, 1.5);
      spectra.emplace_back(seed_label("seeded", seed), std::move(v));
    }
    const std::vector<double> qs = c.q ? std::vector<double>{*c.q} : std::vector<double>{p, kInfinity};
    for (double q : qs)
      for (const auto& [name, mu] : spectra) {
        char head[64];
        std::snprintf(head, sizeof head, "p=%g/q=%s/", p, std::isinf(q) ? "inf" : std::to_string(q).substr(0, 4).c_str());
        const std::string label = head + name;
        nlohmann::json lengths = nlohmann::json::array();
        double prev = 0.0, max_drift = 0.0;
        for (int level = kMinLevel; level <= kMaxLevel; ++level) {
          const std::size_t len = std::size_t{1} << level;
          const RatioCheck r = check_lpq_equivalence(make_spectrum({mu.begin(), mu.begin() + len}), p, q);
          if (r.degenerate) s.fail(label, "degenerate ratio");
          if (!(r.value >= th::kLpqBandLow && r.value <= th::kLpqBandHigh))
            s.fail(label, "ratio " + std::to_string(r.value) + " outside the band");
          if (level > kMinLevel) max_drift = std::max(max_drift, drift(prev, r.value));
          prev = r.value;
          s.worst = std::max(s.worst, r.value);
          lengths.push_back({{"length", len}, {"ratio", r.value}});
        }
        if (!(max_drift < th::kLpqDoublingDrift)) s.fail(label, "drift per doubling " + std::to_string(max_drift));
        s.cases.push_back({{"label", label}, {"lengths", lengths}, {"max_drift", max_drift}});
      }
  }
}


void suite_nonlinear(const RunConfig& c, Suite& s) {
  const WaveletFilter f = parse_filter(c.filter);
  std::vector<double> ps{1.0, 2.0 / 3.0};
  if (c.p) ps = {*c.p};
  const DyadicGrid coarse{c.levels, 0.0, 1.0}, fine{c.levels + 1, 0.0, 1.0};
  for (double p : ps) {
    const double alpha = 1.0 / p - 0.5;
    const std::size_t count = c.seed_last - c.seed_first + 1;
    std::vector<NonlinearReport> rc(count), rf(count);
    parallel_for(count, [&](std::size_t i) {
      KernelSpec spec{KernelFamily::WaveletSynthetic,
                      {{"alpha", alpha}, {"p", p}, {"finest_level", c.levels - 1}},
                      c.seed_first + i,
                      ""};
      spec.parameters["order"] = f.vanishing_moments;
      rc[i] = verify_nonlinear_equivalence(sample_builtin(spec, coarse, coarse), f, p);
      rf[i] = verify_nonlinear_equivalence(sample_builtin(spec, fine, fine), f, p);
    });
    for (std::size_t i = 0; i < count; ++i) {
      char head[32];
      std::snprintf(head, sizeof head, "p=%.4g/", p);
      const std::string label = head + seed_label("synthetic", c.seed_first + i);
      const double d = drift(rc[i].ratio, rf[i].ratio);
      for (double r : {rc[i].ratio, rf[i].ratio})
        if (!(r >= th::kNonlinearBandLow && r <= th::kNonlinearBandHigh))
          s.fail(label, "ratio " + std::to_string(r) + " outside the band");
      if (!(d < th::kNonlinearRefinementDrift)) s.fail(label, "refinement drift " + std::to_string(d));
      s.worst = std::max({s.worst, rc[i].ratio, rf[i].ratio});
      s.cases.push_back({{"label", label},
                         {"alpha", alpha},
                         {"ratio_coarse", rc[i].ratio},
                         {"ratio_fine", rf[i].ratio},
                         {"approx_quasinorm", rc[i].approx_quasinorm},
                         {"rhs", rc[i].rhs},
                         {"refinement_drift", d}});
    }
  }
}


void suite_main_embedding(const RunConfig& c, Suite& s) {
  const WaveletFilter f = parse_filter(c.filter);
  const double p = c.p.value_or(1.0);
  const EmbeddingReport coarse = verify_main_embedding(corpus(c.levels), f, p);
  const EmbeddingReport fine = verify_main_embedding(corpus(c.levels + 1), f, p);
  for (std::size_t i = 0; i < coarse.cases.size(); ++i) {
    const EmbeddingCase& a = coarse.cases[i];
    const EmbeddingCase& b = fine.cases[i];
    const std::string label = "corpus/" + a.label;
    if (!std::isfinite(a.ratio) || !std::isfinite(b.ratio)) s.fail(label, "non-finite ratio");
    s.cases.push_back({{"label", label},
                       {"ratio_coarse", real(a.ratio)},
                       {"ratio_fine", real(b.ratio)},
                       {"schatten_p", a.lhs},
                       {"l2_norm", a.l2_norm},
                       {"seminorm", a.seminorm}});
  }
  s.worst = std::max(coarse.max_ratio, fine.max_ratio);
  const double d = drift(coarse.max_ratio, fine.max_ratio);
  if (!(d <= th::kEmbeddingRefinementDrift)) s.fail("max_ratio", "refinement drift " + std::to_string(d));

  // Decay of the singular values for planted alpha = 1 on a 2^8 grid. Every
  // admissible coefficient is planted: a sparse pattern caps the rank inside
  // the fit range.
  const DyadicGrid g{8, 0.0, 1.0};
  KernelSpec spec{KernelFamily::WaveletSynthetic,
                  {{"alpha", 1.0},
                   {"p", 2.0 / 3.0},
                   {"density", param(c, "density", 1.0)},
                   {"y_modes", param(c, "y_modes", 96.0)}},
                  c.seed,
                  "decay_a1"};
  const SingularSpectrum mu = singular_values(discretize(sample_builtin(spec, g, g)));
  const FitRange range = middle_decade(mu.size());
  const double rate = decay_rate(mu, range);
  if (!(rate <= th::kDecayExponentMax)) s.fail("decay_a1", "fitted exponent " + std::to_string(rate));
  s.cases.push_back({{"label", "decay_a1"},
                     {"exponent", rate},
                     {"predicted", -1.5},
                     {"fit_range", {range.first, range.last}},
                     {"levels", g.levels}});
}


void suite_schur(const RunConfig& c, Suite& s) {
  const WaveletFilter f = parse_filter(c.filter);
  SchurOptions opt;
  opt.seed = c.seed;
  opt.samples = static_cast<std::size_t>(param(c, "samples", static_cast<double>(opt.samples)));
  opt.ascent_steps = static_cast<std::size_t>(param(c, "ascent_steps", static_cast<double>(opt.ascent_steps)));
  std::vector<double> ps{0.5, 1.0};
  if (c.p) ps = {*c.p};
  for (const SampledKernel& k : corpus(c.levels))
    for (double p : ps) {
      char head[32];
      std::snprintf(head, sizeof head, "p=%g/", p);
      const std::string label = head + ("corpus/" + k.label);
      const SchurReport r = besov_schur_estimate(k, f, p, opt);
      const double ratio = r.min_upper() > 0.0 ? r.lower.value / r.min_upper() : 0.0;
      s.worst = std::max(s.worst, ratio);
      if (!r.consistent) s.fail(label, "lower bound exceeds an upper bound");
      if (k.label == "constant") {
        if (!(r.lower.value >= th::kSchurConstantLowerMin)) s.fail(label, "constant symbol lower bound below 0.999");
        if (!(std::abs(r.rhs - 1.0) <= th::kSchurConstantRhsTolerance)) s.fail(label, "constant symbol RHS != 1");
      }
      s.cases.push_back({{"label", label},
                         {"lower_bound", r.lower.value},
                         {"partition", r.partition.value},
                         {"wavelet_slice", r.wavelet_slice.value},
                         {"besov", r.besov_upper},
                         {"rhs", r.rhs},
                         {"empirical_constant", r.empirical_constant},
                         {"consistent", r.consistent}});
    }

  // Sampled lower bound against the small-matrix oracle on 4 x 4 symbols.
  const std::size_t count = c.seed_last - c.seed_first + 1;
  std::vector<double> lower(count), oracle(count), spread(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t seed = c.seed_first + i;
    Rng rng(derive_seed(seed, "schur-oracle"));
    Matrix a(4, 4);
    for (double& v : a.data()) v = rng.normal();
    const OracleResult o = matrix_mp_oracle(a, 1.0, 16, seed);
    lower[i] = rank_one_lower_bound(SchurSymbol::from_matrix(a), 1.0, opt.samples, opt.ascent_steps, seed).value;
    oracle[i] = o.value;
    spread[i] = o.spread;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const std::string label = seed_label("oracle4x4", c.seed_first + i);
    const double gap = std::abs(lower[i] - oracle[i]) / oracle[i];
    if (!(gap <= th::kSchurOracleAgreement)) s.fail(label, "sampled bound differs from oracle by " + std::to_string(gap));
    s.cases.push_back(
        {{"label", label}, {"lower_bound", lower[i]}, {"oracle", oracle[i]}, {"oracle_spread", spread[i]}, {"gap", gap}});
  }
}

}  // namespace

SuiteResult run_suite(const RunConfig& c) {
  static const std::map<std::string, std::function<void(const RunConfig&, Suite&)>> suites{
      {"hardy", suite_hardy},       {"mu_estimate", suite_mu_estimate},       {"lpq", suite_lpq},
      {"nonlinear", suite_nonlinear}, {"main_embedding", suite_main_embedding}, {"schur", suite_schur},
  };
  auto it = suites.find(c.suite);
  if (it == suites.end()) throw UsageError("unknown suite '" + c.suite + "'");
  Suite s;
  nlohmann::json error;
  try {
    it->second(c, s);
  } catch (const Error& e) {
    // Computational failure: keep the partial report and fail the suite.
    error = e.what();
    s.failures.push_back(std::string("error: ") + e.what());
  }
  std::sort(s.cases.begin(), s.cases.end(),
            [](const nlohmann::json& a, const nlohmann::json& b) { return a["label"] < b["label"]; });
  SuiteResult r;
  r.pass = s.failures.empty();
  r.report = {{"suite", c.suite},   {"config", c.to_json()}, {"thresholds", thresholds::table()},
              {"cases", s.cases},   {"worst_ratio", real(s.worst)}, {"failures", s.failures},
              {"pass", r.pass}};
  if (!error.is_null()) r.report["error"] = error;
  return r;
}

}  // namespace besovop::cli
